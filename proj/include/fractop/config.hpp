#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fractop/errors.hpp"
#include "fractop/ifs.hpp"
#include "fractop/measure.hpp"
#include "fractop/operators.hpp"

namespace fractop {

/// Validated experiment configuration shared by every CLI task.
struct RunConfig {
    std::string builtin;  // empty when the system was given explicitly
    IfsSystem system;
    SelfSimilarWeights weights;

    std::size_t N = 100000;
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;
    int level = 4;
    std::pair<int, int> levels{1, 6};
    std::optional<Point> x0;
    std::size_t samples_per_cell = 256;
    MultMode mode = MultMode::collocation;
    std::string function = "x";
    std::string out_dir = "out";
};

namespace detail {

inline AffineMap map_1d(double slope, double offset) {
    AffineMap m;
    m.linear = Eigen::MatrixXd::Constant(1, 1, slope);
    m.offset = Eigen::VectorXd::Constant(1, offset);
    return m;
}

inline Box unit_interval() {
    return {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
}

}  // namespace detail

/// The dyadic interval system gamma_1(x) = x/2, gamma_2(x) = x/2 + 1/2 on
/// [0, 1]; its Hutchinson measure is Lebesgue measure.
inline IfsSystem builtin_example8() {
    return IfsSystem({detail::map_1d(0.5, 0.0), detail::map_1d(0.5, 0.5)},
                     detail::unit_interval());
}

/// The tent-map branches gamma_1(x) = x/2, gamma_2(x) = -x/2 + 1 on [0, 1].
inline IfsSystem builtin_example9_tent() {
    return IfsSystem({detail::map_1d(0.5, 0.0), detail::map_1d(-0.5, 1.0)},
                     detail::unit_interval());
}

/// The middle-thirds Cantor system gamma_1(x) = x/3, gamma_2(x) = x/3 + 2/3.
inline IfsSystem builtin_cantor3() {
    return IfsSystem({detail::map_1d(1.0 / 3.0, 0.0), detail::map_1d(1.0 / 3.0, 2.0 / 3.0)},
                     detail::unit_interval());
}

inline IfsSystem builtin_system(const std::string& name) {
    if (name == "example8") return builtin_example8();
    if (name == "example9-tent") return builtin_example9_tent();
    if (name == "cantor3") return builtin_cantor3();
    throw ValidationError("unknown builtin system '" + name +
                          "' (expected example8, example9-tent or cantor3)");
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key))
            throw ValidationError("unknown key \"" + context + key + "\"");
    }
}

inline Eigen::VectorXd to_vector(const nlohmann::json& j, const std::string& context) {
    if (!j.is_array()) throw ValidationError(context + " must be an array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

inline IfsSystem system_from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    const int dim = j.at("dimension").get<int>();
    const auto& maps_json = j.at("maps");
    if (!maps_json.is_array() || static_cast<int>(maps_json.size()) != n)
        throw ValidationError("\"maps\" must list exactly n maps");
    std::vector<AffineMap> maps;
    for (std::size_t m = 0; m < maps_json.size(); ++m) {
        reject_unknown_keys(maps_json[m], {"A", "b"}, "maps[" + std::to_string(m) + "].");
        const auto& A = maps_json[m].at("A");
        AffineMap map;
        map.linear.resize(dim, dim);
        if (static_cast<int>(A.size()) != dim)
            throw ValidationError("map " + std::to_string(m + 1) + ": A must be " +
                                  std::to_string(dim) + "x" + std::to_string(dim));
        for (int r = 0; r < dim; ++r) {
            if (static_cast<int>(A[static_cast<std::size_t>(r)].size()) != dim)
                throw ValidationError("map " + std::to_string(m + 1) + ": A must be " +
                                      std::to_string(dim) + "x" + std::to_string(dim));
            for (int c = 0; c < dim; ++c)
                map.linear(r, c) = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                                       .get<double>();
        }
        map.offset = to_vector(maps_json[m].at("b"), "maps[" + std::to_string(m) + "].b");
        if (map.offset.size() != dim)
            throw ValidationError("map " + std::to_string(m + 1) + ": b must have length " +
                                  std::to_string(dim));
        try {
            validate_contraction(map);
        } catch (const Error& e) {
            throw ValidationError("map " + std::to_string(m + 1) + " not contractive: " +
                                  e.what());
        }
        maps.push_back(std::move(map));
    }
    const auto& box_json = j.at("box");
    reject_unknown_keys(box_json, {"lo", "hi"}, "box.");
    Box box{to_vector(box_json.at("lo"), "box.lo"), to_vector(box_json.at("hi"), "box.hi")};
    if (box.dim() != dim || box.hi.size() != dim)
        throw ValidationError("box bounds must have length \"dimension\"");
    return IfsSystem(std::move(maps), std::move(box));
}

inline std::pair<int, int> parse_levels(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        const auto dots = s.find("..");
        if (dots == std::string::npos)
            throw ValidationError("\"levels\" string must look like \"A..B\"");
        try {
            return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
        } catch (const std::exception&) {
            throw ValidationError("\"levels\" string must look like \"A..B\"");
        }
    }
    if (j.is_array() && j.size() == 2) return {j[0].get<int>(), j[1].get<int>()};
    throw ValidationError("\"levels\" must be \"A..B\" or [A, B]");
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"builtin", "n", "dimension", "maps", "weights", "box", "N", "burn_in", "seed",
         "level", "levels", "x0", "samples_per_cell", "mode", "a", "out"},
        "");

    std::string builtin;
    std::optional<IfsSystem> system;
    if (j.contains("builtin")) {
        builtin = j.at("builtin").get<std::string>();
        system = builtin_system(builtin);
        if (j.contains("maps") || j.contains("n") || j.contains("dimension") ||
            j.contains("box"))
            throw ValidationError("\"builtin\" excludes an explicit system definition");
    } else {
        system = detail::system_from_json(j);
    }

    SelfSimilarWeights weights = SelfSimilarWeights::hutchinson(system->n());
    if (j.contains("weights")) {
        std::vector<double> p = j.at("weights").get<std::vector<double>>();
        if (static_cast<int>(p.size()) != system->n())
            throw ValidationError("weight count does not match the number of maps");
        weights = SelfSimilarWeights(std::move(p));
    }

    RunConfig cfg{std::move(builtin), std::move(*system), std::move(weights)};
    if (j.contains("N")) cfg.N = j.at("N").get<std::size_t>();
    if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("level")) cfg.level = j.at("level").get<int>();
    if (j.contains("levels")) cfg.levels = detail::parse_levels(j.at("levels"));
    if (j.contains("x0")) {
        Point p = detail::to_vector(j.at("x0"), "x0");
        if (!cfg.system.ambient().contains(p))
            throw ValidationError("x0 must lie in the ambient box");
        cfg.x0 = std::move(p);
    }
    if (j.contains("samples_per_cell"))
        cfg.samples_per_cell = j.at("samples_per_cell").get<std::size_t>();
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "collocation") {
            cfg.mode = MultMode::collocation;
        } else if (m == "average") {
            cfg.mode = MultMode::average;
        } else {
            throw ValidationError("\"mode\" must be collocation or average");
        }
    }
    if (j.contains("a")) cfg.function = j.at("a").get<std::string>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (cfg.N < 1) throw ValidationError("chaos_game needs N >= 1");
    if (cfg.levels.first < 0 || cfg.levels.first > cfg.levels.second)
        throw ValidationError("need 0 <= k_min <= k_max");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()));
    }
    try {
        return config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

}  // namespace fractop

#pragma once

#include <chrono>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "fractop/approx.hpp"
#include "fractop/config.hpp"
#include "fractop/expr.hpp"
#include "fractop/io.hpp"
#include "fractop/measure.hpp"
#include "fractop/operators.hpp"

namespace fractop {

enum class Task { sample, separation, relations, approx, report };

inline Task task_from_name(const std::string& name) {
    if (name == "sample") return Task::sample;
    if (name == "check-separation") return Task::separation;
    if (name == "verify-relations") return Task::relations;
    if (name == "approx") return Task::approx;
    if (name == "report") return Task::report;
    throw ValidationError("unknown task '" + name + "'");
}

inline std::string task_name(Task t) {
    switch (t) {
        case Task::sample: return "sample";
        case Task::separation: return "check-separation";
        case Task::relations: return "verify-relations";
        case Task::approx: return "approx";
        case Task::report: return "report";
    }
    return "?";
}

struct RunReport {
    nlohmann::json json;
    bool pass = true;
    std::vector<std::string> files;
};

namespace detail {

inline nlohmann::json config_echo(const RunConfig& cfg) {
    nlohmann::json j;
    if (!cfg.builtin.empty()) j["builtin"] = cfg.builtin;
    j["n"] = cfg.system.n();
    j["dimension"] = cfg.system.dim();
    j["weights"] = cfg.weights.p;
    j["N"] = cfg.N;
    j["burn_in"] = cfg.burn_in;
    j["seed"] = cfg.seed;
    j["level"] = cfg.level;
    j["levels"] = {cfg.levels.first, cfg.levels.second};
    j["samples_per_cell"] = cfg.samples_per_cell;
    j["mode"] = cfg.mode == MultMode::collocation ? "collocation" : "average";
    j["a"] = cfg.function;
    j["out"] = cfg.out_dir;
    return j;
}

inline nlohmann::json check(const std::string& operation, const nlohmann::json& parameters,
                            double value, double tolerance, bool pass) {
    return {{"operation", operation},
            {"parameters", parameters},
            {"residual", value},
            {"tolerance", tolerance},
            {"pass", pass}};
}

inline int capped_level(int n, int requested) {
    int k = requested;
    for (;;) {
        try {
            level_dim(n, k + 1);  // relation checks pass through H_{k+1}
            return k;
        } catch (const LevelOverflow&) {
            --k;
        }
    }
}

inline void run_sample(const RunConfig& cfg, RunReport& rep,
                       const std::filesystem::path& dir) {
    const EmpiricalMeasure m = chaos_game(cfg.system, cfg.weights, cfg.N, cfg.burn_in, cfg.seed);
    const std::filesystem::path csv = dir / "points.csv";
    write_points_csv(m, csv);
    rep.files.push_back(csv.string());
    std::size_t outside = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!cfg.system.ambient().contains(m.point(i))) ++outside;
    rep.json["checks"].push_back(check(
        "chaos_game", {{"N", cfg.N}, {"burn_in", cfg.burn_in}, {"seed", cfg.seed}},
        static_cast<double>(outside), 0.0, outside == 0));
    rep.pass = rep.pass && outside == 0;
}

inline void run_separation(const RunConfig& cfg, RunReport& rep) {
    const EmpiricalMeasure m = chaos_game(
        cfg.system, SelfSimilarWeights::hutchinson(cfg.system.n()), cfg.N, cfg.burn_in,
        cfg.seed);
    const double overlap = separation_overlap(cfg.system, m);
    const double tol = separation_threshold(cfg.N);
    rep.json["checks"].push_back(
        check("separation_overlap", {{"N", cfg.N}, {"seed", cfg.seed}}, overlap, tol,
              overlap <= tol));
    rep.pass = rep.pass && overlap <= tol;
}

inline void run_relations(const RunConfig& cfg, RunReport& rep) {
    const int k = capped_level(cfg.system.n(), cfg.level);
    const auto [d1, d2] = cuntz_relation_defects(cfg.system.n(), k);
    const double tol = 1e-13;
    rep.json["checks"].push_back(check(
        "cuntz_relation_defects", {{"n", cfg.system.n()}, {"k", k}}, std::max(d1, d2), tol,
        d1 <= tol && d2 <= tol));
    rep.pass = rep.pass && d1 <= tol && d2 <= tol;

    const expr::Expr a = expr::parse(cfg.function, cfg.system.dim());
    const ScalarFunction eval = [a](const Point& x) { return expr::eval(a, x); };
    const int kc = std::min(k, 6);
    for (int i = 1; i <= cfg.system.n(); ++i) {
        const double defect = covariance_defect(cfg.system, eval, i, kc,
                                                MultMode::collocation, cfg.samples_per_cell,
                                                cfg.x0, cfg.seed);
        rep.json["checks"].push_back(check(
            "covariance_defect", {{"a", cfg.function}, {"i", i}, {"k", kc}}, defect, tol,
            defect <= tol));
        rep.pass = rep.pass && defect <= tol;
    }
}

inline void run_approx(const RunConfig& cfg, RunReport& rep,
                       const std::filesystem::path& dir) {
    const expr::Expr ast = expr::parse(cfg.function, cfg.system.dim());
    const ContinuousFunctionSpec a = expr::to_function_spec(ast, cfg.system.ambient());
    const auto rows =
        convergence_report(cfg.system, a, cfg.levels.first, cfg.levels.second, cfg.x0,
                           cfg.samples_per_cell, cfg.seed);

    std::string csv = "k,error_sup,matrix_error,certified_bound,decay_ratio\n";
    for (const auto& row : rows) {
        csv += std::to_string(row.k) + ',' + format_double(row.error_sup) + ',' +
               format_double(row.matrix_error) + ',' + format_double(row.certified_bound) +
               ',' + format_double(row.decay_ratio) + '\n';
    }
    const std::filesystem::path path = dir / "approx_report.csv";
    write_file_atomic(path, csv);
    rep.files.push_back(path.string());

    bool sandwich = true;
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double sampling_tol =
            *a.lipschitz * cylinder_diameter_bound(cfg.system, rows[i].k) /
            std::sqrt(static_cast<double>(cfg.samples_per_cell));
        sandwich = sandwich && rows[i].matrix_error <= rows[i].error_sup + sampling_tol &&
                   rows[i].error_sup <= rows[i].certified_bound + 1e-12;
        if (i) monotone = monotone && rows[i].certified_bound <= rows[i - 1].certified_bound;
    }
    rep.json["checks"].push_back(check(
        "convergence_report",
        {{"a", cfg.function},
         {"lipschitz", *a.lipschitz},
         {"levels", {cfg.levels.first, cfg.levels.second}}},
        rows.empty() ? 0.0 : rows.back().error_sup,
        rows.empty() ? 0.0 : rows.back().certified_bound, sandwich && monotone));
    rep.pass = rep.pass && sandwich && monotone;
}

inline void run_measure_checks(const RunConfig& cfg, RunReport& rep) {
    const SelfSimilarWeights hutchinson = SelfSimilarWeights::hutchinson(cfg.system.n());
    const EmpiricalMeasure m =
        chaos_game(cfg.system, hutchinson, cfg.N, cfg.burn_in, cfg.seed);
    const double mc_tol = 0.02;

    const CellPartition part3 = CellPartition::build(cfg.system, 3);
    const double ss = self_similarity_residual(m, cfg.system, hutchinson, part3);
    rep.json["checks"].push_back(check("self_similarity_residual",
                                       {{"N", cfg.N}, {"k", 3}, {"seed", cfg.seed}}, ss,
                                       mc_tol, ss <= mc_tol));
    rep.pass = rep.pass && ss <= mc_tol;

    const CellPartition part2 = CellPartition::build(cfg.system, 2);
    for (int i = 1; i <= cfg.system.n(); ++i) {
        const double im = image_measure_residual(m, cfg.system, i, part2);
        rep.json["checks"].push_back(check("image_measure_residual",
                                           {{"N", cfg.N}, {"k", 2}, {"i", i}}, im, mc_tol,
                                           im <= mc_tol));
        rep.pass = rep.pass && im <= mc_tol;
    }
}

}  // namespace detail

/// Execute one task pipeline: compute, write artifacts under cfg.out_dir,
/// return the machine-readable report. All CSV artifacts are byte-identical
/// across runs with the same (config, seed); wall-clock timing lives only in
/// the report JSON.
inline RunReport run_task(const RunConfig& cfg, Task task) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    RunReport rep;
    rep.json["task"] = task_name(task);
    rep.json["config"] = detail::config_echo(cfg);
    rep.json["checks"] = nlohmann::json::array();

    try {
        switch (task) {
            case Task::sample: detail::run_sample(cfg, rep, dir); break;
            case Task::separation: detail::run_separation(cfg, rep); break;
            case Task::relations: detail::run_relations(cfg, rep); break;
            case Task::approx: detail::run_approx(cfg, rep, dir); break;
            case Task::report:
                detail::run_sample(cfg, rep, dir);
                detail::run_separation(cfg, rep);
                detail::run_relations(cfg, rep);
                detail::run_approx(cfg, rep, dir);
                detail::run_measure_checks(cfg, rep);
                break;
        }
    } catch (const Error& e) {
        throw Error("task " + task_name(task) + ": " + e.what());
    }

    rep.json["pass"] = rep.pass;
    rep.json["files"] = rep.files;
    rep.json["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();

    const std::filesystem::path report_path = dir / (task_name(task) + "_report.json");
    write_file_atomic(report_path, rep.json.dump(2) + "\n");
    rep.files.push_back(report_path.string());
    return rep;
}

}  // namespace fractop

// End-to-end acceptance checks: one line of output per criterion, exit code 0
// iff every criterion passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fractop/approx.hpp"
#include "fractop/config.hpp"
#include "fractop/expr.hpp"
#include "fractop/runner.hpp"
#include "fractop/word_algebra.hpp"

using namespace fractop;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s — %s\n", pass ? "pass" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Point pt(double x) { return Eigen::VectorXd::Constant(1, x); }

// ---- 1. exact Cuntz relations ------------------------------------------------

void criterion_cuntz_relations() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int n : {2, 3, 4}) {
        for (int k = 1; k <= 8; ++k) {
            if (level_dim(n, k) > 65536) break;
            const auto [d1, d2] = cuntz_relation_defects(n, k);
            worst = std::max({worst, d1, d2});
        }
    }
    const double secs = elapsed_s(t0);
    report(1, "Cuntz relations V_i* V_i = I and sum_j V_j V_j* = I hold exactly",
           worst <= 1e-13 && secs < 10.0,
           "max defect " + fmt(worst) + " (tol 1e-13), " + fmt(secs) + " s (< 10 s)");
}

// ---- 2. self-similarity fixed point ------------------------------------------

void criterion_hutchinson_fixed_point() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (const std::string name : {"example8", "cantor3"}) {
        const IfsSystem ifs = builtin_system(name);
        const auto hutch = SelfSimilarWeights::hutchinson(ifs.n());
        const auto part = CellPartition::build(ifs, 3);
        auto residual = [&](std::size_t N, std::uint64_t seed) {
            return self_similarity_residual(chaos_game(ifs, hutch, N, 100, seed), ifs,
                                            hutch, part);
        };
        const double at_1e5 = residual(100000, 1);
        pass = pass && at_1e5 <= 0.02;

        auto median = [&](std::size_t N) {
            std::vector<double> r;
            for (std::uint64_t seed = 1; seed <= 10; ++seed) r.push_back(residual(N, seed));
            std::sort(r.begin(), r.end());
            return 0.5 * (r[4] + r[5]);
        };
        const double coarse = median(25000);
        const double fine = median(100000);
        pass = pass && fine <= 0.6 * coarse;  // Monte-Carlo rate: x4 samples halves it
        detail += name + " residual " + fmt(at_1e5) + ", median ratio " +
                  fmt(fine / coarse) + "; ";
    }
    const double secs = elapsed_s(t0);
    pass = pass && secs < 30.0;
    report(2, "chaos-game measure satisfies the self-similarity fixed-point equation", pass,
           detail + fmt(secs) + " s (< 30 s)");
}

// ---- 3. dyadic system samples Lebesgue measure --------------------------------

void criterion_lebesgue_coincidence() {
    const IfsSystem ex8 = builtin_example8();
    const auto m = chaos_game(ex8, SelfSimilarWeights::hutchinson(2), 100000, 100, 2);
    const auto part = CellPartition::build(ex8, 3);
    double worst = 0.0;
    for (std::size_t r = 0; r < part.cells(); ++r)
        worst = std::max(worst, std::abs(box_mass(m, part.boxes[r]) - 0.125));
    report(3, "dyadic-interval system reproduces Lebesgue cell masses", worst <= 0.01,
           "max |mass - 1/8| = " + fmt(worst) + " over the 8 level-3 cells (tol 0.01)");
}

// ---- 4. Radon-Nikodym derivative ----------------------------------------------

void criterion_radon_nikodym() {
    const IfsSystem ex8 = builtin_example8();
    const auto m = chaos_game(ex8, SelfSimilarWeights::hutchinson(2), 100000, 100, 3);
    const auto part = CellPartition::build(ex8, 3);
    const auto est1 = rn_derivative_estimate(m, ex8, 1, part);
    const auto est2 = rn_derivative_estimate(m, ex8, 2, part);
    bool pass = true;
    double worst_on = 0.0, worst_off = 0.0, worst_sum = 0.0;
    for (std::size_t r = 0; r < part.cells(); ++r) {
        pass = pass && !est1.flagged[r];
        if (part.boxes[r].center()[0] < 0.5) {
            worst_on = std::max(worst_on, std::abs(est1.value[r] - 2.0));
        } else {
            worst_off = std::max(worst_off, est1.value[r]);
        }
        worst_sum = std::max(worst_sum, std::abs(est1.value[r] + est2.value[r] - 2.0));
    }
    pass = pass && worst_on <= 0.1 && worst_off <= 0.05 && worst_sum <= 0.15;
    report(4, "Radon-Nikodym estimates match the step-function derivative", pass,
           "|d - 2| = " + fmt(worst_on) + " on the branch image (tol 0.1), " +
               fmt(worst_off) + " off it (tol 0.05), branch-sum deviation " +
               fmt(worst_sum) + " (tol 0.15)");
}

// ---- 5. pushforward identity ---------------------------------------------------

void criterion_pushforward() {
    double worst = 0.0;
    for (const std::string name : {"example8", "cantor3"}) {
        const IfsSystem ifs = builtin_system(name);
        const auto m =
            chaos_game(ifs, SelfSimilarWeights::hutchinson(ifs.n()), 100000, 100, 5);
        const auto part = CellPartition::build(ifs, 2);
        for (int i = 1; i <= ifs.n(); ++i)
            worst = std::max(worst, image_measure_residual(m, ifs, i, part));
    }
    report(5, "image measures satisfy mu(gamma_i E) = mu(E)/n", worst <= 0.02,
           "max residual " + fmt(worst) + " at level 2, both systems (tol 0.02)");
}

// ---- 6. covariance relation -----------------------------------------------------

void criterion_covariance() {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    double worst = 0.0;
    const IfsSystem systems[] = {builtin_example8(), builtin_example9_tent()};
    for (int trial = 0; trial < 10; ++trial) {
        double c[5];
        for (double& v : c) v = coeff(gen);
        const ScalarFunction a = [c](const Point& x) {
            const double t = x[0];
            return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
        };
        for (const IfsSystem& ifs : systems)
            for (int k = 1; k <= 6; ++k)
                for (int i = 1; i <= ifs.n(); ++i)
                    worst = std::max(worst, covariance_defect(ifs, a, i, k));
    }
    report(6, "collocation multipliers satisfy M_a V_i = V_i M_{a o gamma_i} exactly",
           worst <= 1e-13,
           "max defect " + fmt(worst) + " over 10 random quartics, 2 systems, k <= 6 "
           "(tol 1e-13)");
}

// ---- 7. operator-norm approximation of M_a --------------------------------------

void criterion_approximation() {
    const auto t0 = std::chrono::steady_clock::now();
    const IfsSystem ex8 = builtin_example8();
    bool pass = true;
    std::string detail;

    // a(x) = x, x0 = 0: closed-form errors
    const ContinuousFunctionSpec ident{[](const Point& x) { return x[0]; }, 1.0, nullptr};
    double worst_rel = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const CuntzApproximant appr = build_approximant(ex8, ident, k, pt(0.0));
        const double target = std::pow(0.5, k);
        worst_rel = std::max(worst_rel,
                             std::abs(error_sup(ex8, ident, appr) - target) / target);
        pass = pass && certified_bound(ident, ex8, k) == target;
    }
    pass = pass && worst_rel <= 0.02;
    detail += "sup-error off 2^-k by " + fmt(worst_rel) + " rel (tol 0.02), bound exact; ";

    // sandwich for 20 random Lipschitz multipliers (certified constants from
    // interval arithmetic on random cubics)
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int trial = 0; trial < 20 && pass; ++trial) {
        std::string text = fmt(coeff(gen)) + " + " + fmt(coeff(gen)) + "*x + " +
                           fmt(coeff(gen)) + "*x^2 + " + fmt(coeff(gen)) + "*x^3";
        const ContinuousFunctionSpec a =
            expr::to_function_spec(expr::parse(text, 1), ex8.ambient());
        for (int k = 1; k <= 4; ++k) {
            const CuntzApproximant appr = build_approximant(ex8, a, k);
            const double sup = error_sup(ex8, a, appr);
            const double sampling_tol = *a.lipschitz * cylinder_diameter_bound(ex8, k) /
                                        std::sqrt(256.0);
            pass = pass && matrix_error(ex8, a, appr, k + 2) <= sup + sampling_tol;
            pass = pass && sup <= certified_bound(a, ex8, k) + 1e-12;
        }
    }
    detail += std::string("sandwich for 20 random Lipschitz a ") +
              (pass ? "holds" : "violated") + "; ";

    // decay ratios track the contraction factor of the Cantor system
    const IfsSystem cantor = builtin_cantor3();
    const auto rows = convergence_report(cantor, ident, 1, 6, pt(0.0));
    double worst_ratio_dev = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        worst_ratio_dev = std::max(worst_ratio_dev,
                                   std::abs(rows[i].decay_ratio - 1.0 / 3.0));
    pass = pass && worst_ratio_dev <= 0.1;
    const double secs = elapsed_s(t0);
    pass = pass && secs < 60.0;
    report(7, "Cuntz-word approximants of M_a converge at the contraction rate", pass,
           detail + "Cantor decay ratio within " + fmt(worst_ratio_dev) +
               " of 1/3 (tol 0.1), " + fmt(secs) + " s (< 60 s)");
}

// ---- 8. symbolic word algebra matches the operator model -------------------------

void criterion_symbolic_numeric() {
    std::mt19937_64 gen(81);
    std::uniform_int_distribution<int> len(0, 3);
    std::uniform_int_distribution<int> letter(1, 2);
    std::uniform_int_distribution<int> nterms(1, 4);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);

    auto random_poly = [&]() {
        std::vector<CuntzTerm> ts;
        const int count = nterms(gen);
        for (int t = 0; t < count; ++t) {
            Word alpha(static_cast<std::size_t>(len(gen)));
            Word beta(static_cast<std::size_t>(len(gen)));
            for (auto& l : alpha) l = letter(gen);
            for (auto& l : beta) l = letter(gen);
            ts.push_back(CuntzTerm{Complex{coeff(gen), coeff(gen)}, alpha, beta});
        }
        return CuntzPolynomial(2, std::move(ts));
    };
    auto random_vec = [&](int level) {
        LeveledVector v = LeveledVector::zero(2, level);
        for (Eigen::Index r = 0; r < v.coeffs.size(); ++r)
            v.coeffs[r] = Complex{coeff(gen), coeff(gen)};
        return v;
    };
    // apply a polynomial term by term through the opspace isometries, without
    // the word-algebra evaluator's bookkeeping
    auto apply_via_opspace = [](const CuntzPolynomial& p, const LeveledVector& v,
                                int out_level) {
        LeveledVector acc = LeveledVector::zero(v.n, out_level);
        for (const auto& t : p.terms()) {
            LeveledVector w = refine(v, std::max<int>(0, static_cast<int>(t.beta.size()) -
                                                             v.level));
            for (int l : t.beta) w = apply_coisometry(l, w);
            for (auto it = t.alpha.rbegin(); it != t.alpha.rend(); ++it)
                w = apply_isometry(*it, w);
            w = refine(w, out_level - w.level);
            acc.coeffs += t.coeff * w.coeffs;
        }
        return acc;
    };

    double worst_eval = 0.0, worst_hom = 0.0, worst_adj = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const CuntzPolynomial p = random_poly();
        const CuntzPolynomial q = random_poly();
        const LeveledVector v = random_vec(6);

        const LeveledVector symbolic = wa_apply(p, v);
        const LeveledVector direct = apply_via_opspace(p, v, symbolic.level);
        worst_eval = std::max(worst_eval, (symbolic.coeffs - direct.coeffs).norm());

        const LeveledVector lhs = wa_apply(wa_multiply(p, q), v);
        const LeveledVector rhs = wa_apply(p, wa_apply(q, v));
        const int lvl = std::max(lhs.level, rhs.level);
        worst_hom = std::max(worst_hom, (refine(lhs, lvl - lhs.level).coeffs -
                                         refine(rhs, lvl - rhs.level).coeffs)
                                            .norm());

        const LeveledVector u = random_vec(6);
        worst_adj = std::max(
            worst_adj, std::abs(inner(wa_apply(p, v), u) -
                                inner(v, wa_apply(wa_adjoint(p), u))));
    }
    const bool pass = worst_eval <= 1e-12 && worst_hom <= 1e-12 && worst_adj <= 1e-12;
    report(8, "symbolic word algebra agrees with the operator-space action", pass,
           "100 random polynomials: evaluation " + fmt(worst_eval) + ", homomorphism " +
               fmt(worst_hom) + ", adjoint " + fmt(worst_adj) + " (tol 1e-12)");
}

// ---- 9. deterministic artifacts ---------------------------------------------------

void criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "fractop_acceptance_determinism";
    fs::remove_all(base);
    auto run_into = [&](const std::string& sub) {
        nlohmann::json j = {{"builtin", "example8"}, {"seed", 7}, {"out", (base / sub).string()}};
        return run_task(config_from_json(j), Task::report);
    };
    const RunReport r1 = run_into("run1");
    const RunReport r2 = run_into("run2");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    };
    bool identical = r1.pass && r2.pass;
    for (const char* csv : {"points.csv", "approx_report.csv"}) {
        const std::string c1 = slurp(base / "run1" / csv);
        identical = identical && !c1.empty() && c1 == slurp(base / "run2" / csv);
    }
    fs::remove_all(base);
    report(9, "report runs with a fixed seed produce byte-identical CSV artifacts",
           identical, std::string("points.csv and approx_report.csv ") +
                          (identical ? "match" : "differ"));
}

}  // namespace

int main() {
    try {
        criterion_cuntz_relations();
        criterion_hutchinson_fixed_point();
        criterion_lebesgue_coincidence();
        criterion_radon_nikodym();
        criterion_pushforward();
        criterion_covariance();
        criterion_approximation();
        criterion_symbolic_numeric();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::printf("[FAIL] unexpected exception: %s\n", e.what());
        return 1;
    }
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}

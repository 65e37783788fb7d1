#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fractop/errors.hpp"
#include "fractop/ifs.hpp"
#include "fractop/operators.hpp"
#include "fractop/rng.hpp"
#include "fractop/word_algebra.hpp"

namespace fractop {

/// A continuous multiplier a in C(K): pointwise evaluator plus optional
/// continuity data used for certified error bounds.
struct ContinuousFunctionSpec {
    ScalarFunction eval;
    std::optional<double> lipschitz;
    std::function<double(double)> modulus;  // modulus of continuity, optional
};

inline constexpr std::size_t kDefaultSamplesPerCell = 256;

/// Level-k coefficient family c_w = a(gamma_w(x0)) approximating M_a by
/// sum_w c_w V_w V_w*.
struct CuntzApproximant {
    int n = 2;
    int level = 0;
    Point base_point;
    Eigen::VectorXcd coeffs;  // indexed by word rank

    /// The approximant as a symbolic polynomial sum_w c_w S_w S_w*.
    CuntzPolynomial as_polynomial() const {
        std::vector<CuntzTerm> terms;
        terms.reserve(static_cast<std::size_t>(coeffs.size()));
        for (Eigen::Index r = 0; r < coeffs.size(); ++r) {
            Word w = rank_to_word(static_cast<std::size_t>(r), level, n);
            terms.push_back(CuntzTerm{coeffs[r], w, w});
        }
        return CuntzPolynomial(n, std::move(terms));
    }

    /// The approximant as a diagonal operator on H_m, m >= level: the entry
    /// at a length-m word is the coefficient of its length-k prefix.
    DiagonalOperator as_diagonal(int m) const {
        if (m < level) throw LevelUnderflow("diagonal level must be >= approximant level");
        const std::size_t dim = level_dim(n, m);
        const std::size_t stride = level_dim(n, m - level);
        DiagonalOperator op{n, m, Eigen::VectorXcd(static_cast<Eigen::Index>(dim))};
        for (std::size_t r = 0; r < dim; ++r)
            op.diag[static_cast<Eigen::Index>(r)] =
                coeffs[static_cast<Eigen::Index>(r / stride)];
        return op;
    }
};

inline CuntzApproximant build_approximant(const IfsSystem& ifs,
                                          const ContinuousFunctionSpec& a, int k,
                                          std::optional<Point> x0 = std::nullopt) {
    const Point base = x0 ? *x0 : ifs.ambient().center();
    if (!ifs.ambient().contains(base))
        throw ValidationError("base point x0 lies outside the ambient box");
    const std::size_t dim = level_dim(ifs.n(), k);
    CuntzApproximant appr{ifs.n(), k, base,
                          Eigen::VectorXcd(static_cast<Eigen::Index>(dim))};
    for (std::size_t r = 0; r < dim; ++r)
        appr.coeffs[static_cast<Eigen::Index>(r)] =
            a.eval(word_point(ifs, rank_to_word(r, k, ifs.n()), base));
    return appr;
}

/// Sampled sup over words w of |a(gamma_w(x)) - c_w|, x running over
/// samples_per_cell seeded uniform draws in the ambient box plus its
/// vertices. Estimates ||M_a - A_k|| from below, exactly in the sampling
/// limit (and exactly already for affine a, whose sup sits on a vertex).
inline double error_sup(const IfsSystem& ifs, const ContinuousFunctionSpec& a,
                        const CuntzApproximant& appr,
                        std::size_t samples_per_cell = kDefaultSamplesPerCell,
                        std::uint64_t seed = 0) {
    const std::vector<Point> corners = ifs.ambient().vertices();
    const std::size_t dim = static_cast<std::size_t>(appr.coeffs.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        const Word w = rank_to_word(r, appr.level, ifs.n());
        const double c = appr.coeffs[static_cast<Eigen::Index>(r)].real();
        SeededRng rng(mix_seed(seed, r));
        auto probe = [&](const Point& x) {
            worst = std::max(worst, std::abs(a.eval(word_point(ifs, w, x)) - c));
        };
        for (const Point& v : corners) probe(v);
        for (std::size_t s = 0; s < samples_per_cell; ++s) {
            Point x(ifs.dim());
            for (int i = 0; i < ifs.dim(); ++i)
                x[i] = rng.uniform(ifs.ambient().lo[i], ifs.ambient().hi[i]);
            probe(x);
        }
    }
    return worst;
}

/// Certified upper bound on ||M_a - A_k||: L * c2^k * diam for Lipschitz a,
/// or modulus(c2^k * diam) when a modulus of continuity is supplied.
inline double certified_bound(const ContinuousFunctionSpec& a, const IfsSystem& ifs, int k) {
    const double cell_diam = cylinder_diameter_bound(ifs, k);
    if (a.lipschitz) return *a.lipschitz * cell_diam;
    if (a.modulus) return a.modulus(cell_diam);
    throw MissingContinuityData("need a Lipschitz constant or modulus of continuity");
}

/// Operator norm of the level-m diagonal of M_a minus the approximant's
/// diagonal: a certified lower bound on ||M_a - A_k|| that grows with m.
inline double matrix_error(const IfsSystem& ifs, const ContinuousFunctionSpec& a,
                           const CuntzApproximant& appr, int m,
                           MultMode mode = MultMode::collocation,
                           std::size_t mc_samples = kDefaultMcSamples,
                           std::uint64_t seed = 0) {
    if (m < appr.level) throw LevelUnderflow("matrix level must be >= approximant level");
    std::optional<Point> x0;
    if (mode == MultMode::collocation) x0 = appr.base_point;
    const DiagonalOperator ma = mult_operator(ifs, a.eval, m, mode, mc_samples, x0, seed);
    const DiagonalOperator ak = appr.as_diagonal(m);
    return (ma.diag - ak.diag).cwiseAbs().maxCoeff();
}

struct ConvergenceRow {
    int k;
    double error_sup;
    double matrix_error;
    double certified_bound;
    double decay_ratio;  // error_sup(k) / error_sup(k-1); NaN on the first row
};

/// Per-level error table for k in [k_min, k_max]. matrix_error is evaluated
/// two levels below the approximant (capped by the size budget).
inline std::vector<ConvergenceRow> convergence_report(
    const IfsSystem& ifs, const ContinuousFunctionSpec& a, int k_min, int k_max,
    std::optional<Point> x0 = std::nullopt,
    std::size_t samples_per_cell = kDefaultSamplesPerCell, std::uint64_t seed = 0) {
    if (k_min < 0 || k_min > k_max) throw ValidationError("need 0 <= k_min <= k_max");
    std::vector<ConvergenceRow> rows;
    double prev = std::nan("");
    for (int k = k_min; k <= k_max; ++k) {
        const CuntzApproximant appr = build_approximant(ifs, a, k, x0);
        int m = k + 2;
        while (m > k) {
            try {
                level_dim(ifs.n(), m);
                break;
            } catch (const LevelOverflow&) {
                --m;
            }
        }
        ConvergenceRow row{};
        row.k = k;
        row.error_sup = error_sup(ifs, a, appr, samples_per_cell, seed);
        row.matrix_error = matrix_error(ifs, a, appr, m);
        row.certified_bound = certified_bound(a, ifs, k);
        row.decay_ratio = row.error_sup / prev;
        prev = row.error_sup;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fractop

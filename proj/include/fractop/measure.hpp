#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fractop/errors.hpp"
#include "fractop/ifs.hpp"
#include "fractop/rng.hpp"

namespace fractop {

/// Probability weights (p_1, ..., p_n) of a self-similar measure; the
/// Hutchinson measure is the uniform case p_i = 1/n.
struct SelfSimilarWeights {
    std::vector<double> p;

    explicit SelfSimilarWeights(std::vector<double> weights) : p(std::move(weights)) {
        double sum = 0.0;
        for (double w : p) {
            if (!(w > 0.0)) throw InvalidWeights("weights must be strictly positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidWeights("weights must sum to 1 within 1e-12");
    }

    static SelfSimilarWeights hutchinson(int n) {
        return SelfSimilarWeights(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
    }

    bool is_hutchinson() const {
        const double u = 1.0 / static_cast<double>(p.size());
        for (double w : p)
            if (std::abs(w - u) > 1e-12) return false;
        return true;
    }
};

/// Uniformly weighted point cloud approximating a self-similar measure.
struct EmpiricalMeasure {
    Eigen::MatrixXd points;  // N x d, one sample per row
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
    std::vector<double> weights;

    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }

    Point point(std::size_t i) const { return points.row(static_cast<Eigen::Index>(i)); }
};

/// Random iteration x_{t+1} = gamma_{i_t}(x_t) started from the box center;
/// the first burn_in iterates are discarded. Bit-for-bit reproducible for a
/// fixed (seed, N, burn_in).
inline EmpiricalMeasure chaos_game(const IfsSystem& ifs, const SelfSimilarWeights& w,
                                   std::size_t N, std::size_t burn_in,
                                   std::uint64_t seed) {
    if (static_cast<int>(w.p.size()) != ifs.n())
        throw InvalidWeights("weight count does not match the number of maps");
    if (N < 1) throw ValidationError("chaos_game needs N >= 1");

    std::vector<double> cum(w.p.size());
    std::partial_sum(w.p.begin(), w.p.end(), cum.begin());

    SeededRng rng(seed);
    Point x = ifs.ambient().center();
    EmpiricalMeasure m;
    m.points.resize(static_cast<Eigen::Index>(N), ifs.dim());
    m.seed = seed;
    m.burn_in = burn_in;
    m.weights = w.p;
    for (std::size_t t = 0; t < burn_in + N; ++t) {
        x = ifs.map(static_cast<int>(rng.pick(cum)) + 1)(x);
        if (t >= burn_in) m.points.row(static_cast<Eigen::Index>(t - burn_in)) = x;
    }
    return m;
}

/// The level-k cylinder partition: one geometric cell (image box of gamma_w)
/// per word of length k, indexed by word rank.
struct CellPartition {
    int level = 0;
    int n = 2;
    std::vector<Box> boxes;

    static CellPartition build(const IfsSystem& ifs, int k) {
        CellPartition part;
        part.level = k;
        part.n = ifs.n();
        const std::size_t cells = level_dim(ifs.n(), k);
        part.boxes.reserve(cells);
        for (std::size_t r = 0; r < cells; ++r)
            part.boxes.push_back(
                image_box(compose_word(ifs, rank_to_word(r, k, ifs.n())), ifs.ambient()));
        return part;
    }

    std::size_t cells() const { return boxes.size(); }
};

/// Fraction of sample points inside `box` (inclusive up to tol).
inline double box_mass(const EmpiricalMeasure& m, const Box& box, double tol = kGeoTol) {
    if (m.size() == 0) throw EmptyMeasure("measure has no sample points");
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (box.contains(m.point(i), tol)) ++count;
    return static_cast<double>(count) / static_cast<double>(m.size());
}

/// Per-cell sample counts; a point on a shared face goes to the lowest-index
/// cell, so every point is counted at most once.
inline std::vector<std::size_t> assign_cells(const EmpiricalMeasure& m,
                                             const CellPartition& part,
                                             double tol = kGeoTol) {
    if (m.size() == 0) throw EmptyMeasure("measure has no sample points");
    std::vector<std::size_t> counts(part.cells(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Point p = m.point(i);
        for (std::size_t r = 0; r < part.cells(); ++r) {
            if (part.boxes[r].contains(p, tol)) {
                ++counts[r];
                break;
            }
        }
    }
    return counts;
}

/// Max over cells E of |m(E) - sum_i p_i m(gamma_i^{-1}(E))|: the empirical
/// defect in the fixed-point equation of the self-similar measure.
inline double self_similarity_residual(const EmpiricalMeasure& m, const IfsSystem& ifs,
                                       const SelfSimilarWeights& w,
                                       const CellPartition& part) {
    if (part.level < 1) throw ValidationError("partition level must be >= 1");
    const auto counts = assign_cells(m, part);
    const double N = static_cast<double>(m.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < part.cells(); ++r) {
        double rhs = 0.0;
        for (int i = 1; i <= ifs.n(); ++i) {
            const Box pre = image_box(ifs.map(i).inverse(), part.boxes[r]);
            rhs += w.p[static_cast<std::size_t>(i - 1)] * box_mass(m, pre);
        }
        worst = std::max(worst, std::abs(static_cast<double>(counts[r]) / N - rhs));
    }
    return worst;
}

/// Max over cells E of |m(gamma_i(E)) - (1/n) m(E)|, the pushforward identity
/// (mu^H ∘ gamma_i)(E) = mu^H(E)/n tested on the cylinder family.
inline double image_measure_residual(const EmpiricalMeasure& m, const IfsSystem& ifs,
                                     int i, const CellPartition& part) {
    const auto counts = assign_cells(m, part);
    const double N = static_cast<double>(m.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < part.cells(); ++r) {
        const double lhs = box_mass(m, image_box(ifs.map(i), part.boxes[r]));
        const double rhs = static_cast<double>(counts[r]) / (N * ifs.n());
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Cell averages of the Radon-Nikodym derivative d(gamma_i_* mu^H)/d mu^H,
/// estimated as m(gamma_i^{-1}(E)) / m(E); cells with no samples are flagged.
struct RnEstimate {
    std::vector<double> value;
    std::vector<bool> flagged;
};

inline RnEstimate rn_derivative_estimate(const EmpiricalMeasure& m, const IfsSystem& ifs,
                                         int i, const CellPartition& part) {
    const auto counts = assign_cells(m, part);
    const double N = static_cast<double>(m.size());
    RnEstimate est;
    est.value.resize(part.cells(), 0.0);
    est.flagged.resize(part.cells(), false);
    for (std::size_t r = 0; r < part.cells(); ++r) {
        if (counts[r] == 0) {
            est.flagged[r] = true;
            continue;
        }
        const double num = box_mass(m, image_box(ifs.map(i).inverse(), part.boxes[r]));
        est.value[r] = num / (static_cast<double>(counts[r]) / N);
    }
    return est;
}

/// Max over i != j of the empirical mass of gamma_i(box) ∩ gamma_j(box);
/// the measure separation diagnostic.
inline double separation_overlap(const IfsSystem& ifs, const EmpiricalMeasure& m) {
    double worst = 0.0;
    for (int i = 1; i <= ifs.n(); ++i) {
        const Box bi = image_box(ifs.map(i), ifs.ambient());
        for (int j = i + 1; j <= ifs.n(); ++j) {
            const Box bj = image_box(ifs.map(j), ifs.ambient());
            if (auto cap = intersect(bi, bj))
                worst = std::max(worst, box_mass(m, *cap));
        }
    }
    return worst;
}

/// Acceptance threshold for separation_overlap at sample size N.
inline double separation_threshold(std::size_t N) {
    return 5.0 / std::sqrt(static_cast<double>(N));
}

}  // namespace fractop

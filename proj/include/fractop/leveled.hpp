#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "fractop/errors.hpp"
#include "fractop/ifs.hpp"

namespace fractop {

using Complex = std::complex<double>;

/// Element of the level-k cylinder subspace H_k of L^2(K, mu^H), in the basis
/// e_w = n^{k/2} 1_{[w]} indexed by words of length k in lexicographic order
/// (first letter coarsest).
struct LeveledVector {
    int n = 2;
    int level = 0;
    Eigen::VectorXcd coeffs;

    static LeveledVector zero(int n, int level) {
        return {n, level, Eigen::VectorXcd::Zero(
                              static_cast<Eigen::Index>(level_dim(n, level)))};
    }

    /// Basis vector e_w.
    static LeveledVector basis(int n, const Word& w) {
        LeveledVector v = zero(n, static_cast<int>(w.size()));
        v.coeffs[static_cast<Eigen::Index>(word_rank(w, n))] = 1.0;
        return v;
    }

    double norm() const { return coeffs.norm(); }
};

/// Re-express v at level + steps: each coefficient spreads to its n children
/// with weight n^{-1/2} per step. Exactly norm-preserving.
inline LeveledVector refine(const LeveledVector& v, int steps) {
    if (steps < 0) throw LevelUnderflow("refine steps must be >= 0");
    LeveledVector out = v;
    const double scale = 1.0 / std::sqrt(static_cast<double>(v.n));
    for (int s = 0; s < steps; ++s) {
        LeveledVector next = LeveledVector::zero(out.n, out.level + 1);
        for (Eigen::Index r = 0; r < out.coeffs.size(); ++r) {
            const Complex c = out.coeffs[r] * scale;
            for (int j = 0; j < out.n; ++j) next.coeffs[r * out.n + j] = c;
        }
        out = std::move(next);
    }
    return out;
}

/// L^2 inner product, conjugate-linear in the first argument; both vectors
/// are refined to the common finer level first.
inline Complex inner(const LeveledVector& a, const LeveledVector& b) {
    const int lvl = std::max(a.level, b.level);
    const LeveledVector ra = refine(a, lvl - a.level);
    const LeveledVector rb = refine(b, lvl - b.level);
    return ra.coeffs.dot(rb.coeffs);  // Eigen::dot conjugates the first factor
}

/// V_i e_w = e_{iw}: copies the coefficients into block i one level down the
/// cylinder tree. Exact isometry with range K_i.
inline LeveledVector apply_isometry(int i, const LeveledVector& v) {
    if (i < 1 || i > v.n) throw LetterOutOfRange("branch index out of range");
    LeveledVector out = LeveledVector::zero(v.n, v.level + 1);
    const Eigen::Index block = v.coeffs.size();
    out.coeffs.segment(static_cast<Eigen::Index>(i - 1) * block, block) = v.coeffs;
    return out;
}

/// V_i* e_{iw} = e_w, V_i* e_{jw} = 0 for j != i: extracts block i. A level-0
/// input is refined once first so that V_i* e_empty = n^{-1/2} e_empty.
inline LeveledVector apply_coisometry(int i, const LeveledVector& v,
                                      bool allow_refine = true) {
    if (i < 1 || i > v.n) throw LetterOutOfRange("branch index out of range");
    if (v.level == 0) {
        if (!allow_refine) throw LevelUnderflow("coisometry needs level >= 1");
        return apply_coisometry(i, refine(v, 1), false);
    }
    LeveledVector out = LeveledVector::zero(v.n, v.level - 1);
    const Eigen::Index block = out.coeffs.size();
    out.coeffs = v.coeffs.segment(static_cast<Eigen::Index>(i - 1) * block, block);
    return out;
}

/// C_{gamma_i} = sqrt(n) V_i*, the composition operator f -> f ∘ gamma_i.
inline LeveledVector composition_operator(int i, const LeveledVector& v) {
    LeveledVector out = apply_coisometry(i, v);
    out.coeffs *= std::sqrt(static_cast<double>(v.n));
    return out;
}

}  // namespace fractop

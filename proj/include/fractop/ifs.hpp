#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fractop/affine.hpp"
#include "fractop/errors.hpp"
#include "fractop/geometry.hpp"

namespace fractop {

/// Finite word over the alphabet {1, ..., n}; empty word = identity.
using Word = std::vector<int>;

/// Dense cylinder vectors are refused beyond this many coefficients.
inline constexpr std::size_t kLevelBudget = std::size_t{1} << 24;

/// Number of words of length k, i.e. dim H_k. Throws LevelOverflow past the
/// size budget.
inline std::size_t level_dim(int n, int k) {
    if (k < 0) throw LevelUnderflow("negative level");
    std::size_t d = 1;
    for (int i = 0; i < k; ++i) {
        if (d > kLevelBudget / static_cast<std::size_t>(n))
            throw LevelOverflow("n^k exceeds the size budget 2^24");
        d *= static_cast<std::size_t>(n);
    }
    return d;
}

/// Lexicographic rank of a word, first letter as the coarsest digit.
inline std::size_t word_rank(const Word& w, int n) {
    std::size_t r = 0;
    for (int letter : w) {
        if (letter < 1 || letter > n) throw LetterOutOfRange("letter out of range [1, n]");
        r = r * static_cast<std::size_t>(n) + static_cast<std::size_t>(letter - 1);
    }
    return r;
}

inline Word rank_to_word(std::size_t rank, int k, int n) {
    Word w(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<int>(rank % static_cast<std::size_t>(n)) + 1;
        rank /= static_cast<std::size_t>(n);
    }
    return w;
}

inline std::string word_to_string(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w[i]);
    }
    return s;
}

/// An iterated function system of n >= 2 affine proper contractions together
/// with an ambient box enclosing the self-similar set.
class IfsSystem {
public:
    IfsSystem(std::vector<AffineMap> maps, Box ambient)
        : maps_(std::move(maps)), ambient_(std::move(ambient)) {
        if (maps_.size() < 2) throw ValidationError("an IFS needs n >= 2 maps");
        c1_ = 1.0;
        c2_ = 0.0;
        for (std::size_t i = 0; i < maps_.size(); ++i) {
            auto [c1, c2] = validate_contraction(maps_[i]);
            c1_ = std::min(c1_, c1);
            c2_ = std::max(c2_, c2);
            for (const Point& v : ambient_.vertices()) {
                if (!ambient_.contains(maps_[i](v)))
                    throw ValidationError("map " + std::to_string(i + 1) +
                                          " does not keep the ambient box invariant");
            }
        }
    }

    int n() const { return static_cast<int>(maps_.size()); }
    int dim() const { return ambient_.dim(); }
    const AffineMap& map(int i) const {
        if (i < 1 || i > n()) throw LetterOutOfRange("branch index out of range");
        return maps_[static_cast<std::size_t>(i - 1)];
    }
    const std::vector<AffineMap>& maps() const { return maps_; }
    const Box& ambient() const { return ambient_; }
    double diam() const { return ambient_.diameter(); }
    double c1() const { return c1_; }
    double c2() const { return c2_; }

private:
    std::vector<AffineMap> maps_;
    Box ambient_;
    double c1_ = 0.0;
    double c2_ = 0.0;
};

/// gamma_w = gamma_{w1} ∘ ... ∘ gamma_{wk} (first letter outermost); the
/// empty word gives the identity.
inline AffineMap compose_word(const IfsSystem& ifs, const Word& w) {
    AffineMap acc = AffineMap::identity(ifs.dim());
    for (auto it = w.rbegin(); it != w.rend(); ++it) acc = ifs.map(*it).compose(acc);
    return acc;
}

/// gamma_w(x0) by iterated application (innermost letter first). This exact
/// evaluation order makes rep(i.w) == gamma_i(rep(w)) bit-for-bit, which the
/// collocation operators rely on.
inline Point word_point(const IfsSystem& ifs, const Word& w, const Point& x0) {
    Point x = x0;
    for (auto it = w.rbegin(); it != w.rend(); ++it) x = ifs.map(*it)(x);
    return x;
}

/// Branch inverse: smallest i with y in gamma_i(ambient box) and the preimage
/// x = gamma_i^{-1}(y); ties on overlaps break to the smallest index.
inline std::pair<int, Point> phi_apply(const IfsSystem& ifs, const Point& y,
                                       double tol = kGeoTol) {
    for (int i = 1; i <= ifs.n(); ++i) {
        if (image_box(ifs.map(i), ifs.ambient()).contains(y, tol))
            return {i, ifs.map(i).inverse()(y)};
    }
    throw NoBranch("point lies in no branch image");
}

/// Upper bound c2^k * diam on the diameter of every level-k cylinder.
inline double cylinder_diameter_bound(const IfsSystem& ifs, int k) {
    if (k < 0) throw LevelUnderflow("negative level");
    return std::pow(ifs.c2(), k) * ifs.diam();
}

}  // namespace fractop

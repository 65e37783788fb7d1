#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace fractop {

using Point = Eigen::VectorXd;

/// Geometric tolerance for box-membership tests.
inline constexpr double kGeoTol = 1e-9;

/// Axis-aligned compact box in R^d.
struct Box {
    Point lo;
    Point hi;

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Point& p, double tol = kGeoTol) const {
        for (int i = 0; i < dim(); ++i) {
            if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
        }
        return true;
    }

    Point center() const { return 0.5 * (lo + hi); }

    double diameter() const { return (hi - lo).norm(); }

    /// All 2^d corner points.
    std::vector<Point> vertices() const {
        const int d = dim();
        std::vector<Point> out;
        out.reserve(std::size_t{1} << d);
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            Point v(d);
            for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
            out.push_back(std::move(v));
        }
        return out;
    }
};

/// Intersection of two boxes; empty optional when disjoint (strictly, i.e.
/// touching faces still count as a degenerate intersection).
inline std::optional<Box> intersect(const Box& a, const Box& b) {
    Box out{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)};
    for (int i = 0; i < out.dim(); ++i) {
        if (out.lo[i] > out.hi[i]) return std::nullopt;
    }
    return out;
}

}  // namespace fractop

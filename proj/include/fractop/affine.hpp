#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <utility>

#include "fractop/errors.hpp"
#include "fractop/geometry.hpp"

namespace fractop {

/// Affine map x -> linear * x + offset on R^d.
struct AffineMap {
    Eigen::MatrixXd linear;
    Eigen::VectorXd offset;

    int dim() const { return static_cast<int>(linear.rows()); }

    Point operator()(const Point& x) const { return linear * x + offset; }

    /// this ∘ other (apply `other` first).
    AffineMap compose(const AffineMap& other) const {
        return {linear * other.linear, linear * other.offset + offset};
    }

    AffineMap inverse() const {
        Eigen::MatrixXd inv = linear.inverse();
        return {inv, -inv * offset};
    }

    static AffineMap identity(int d) {
        return {Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
    }
};

/// Distortion bounds (c1, c2) = (sigma_min, sigma_max) of the linear part.
/// Succeeds iff the map is a proper contraction: 0 < c1 <= c2 < 1.
inline std::pair<double, double> validate_contraction(const AffineMap& map) {
    if (map.linear.rows() != map.linear.cols())
        throw Degenerate("linear part is not square");
    if (!map.linear.allFinite() || !map.offset.allFinite())
        throw Degenerate("map has non-finite entries");

    double c1, c2;
    if (map.dim() == 1) {
        c1 = c2 = std::abs(map.linear(0, 0));
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.linear);
        c1 = svd.singularValues().minCoeff();
        c2 = svd.singularValues().maxCoeff();
    }
    if (c1 == 0.0)
        throw Degenerate("linear part is singular (sigma_min = 0)");
    if (c2 >= 1.0)
        throw NotContractive("sigma_max >= 1");
    return {c1, c2};
}

/// Bounding box of the image of `box` (exact for d = 1 and for axis-aligned
/// linear parts; a conservative enclosure otherwise).
inline Box image_box(const AffineMap& map, const Box& box) {
    Point lo = map(box.vertices().front());
    Point hi = lo;
    for (const Point& v : box.vertices()) {
        Point w = map(v);
        lo = lo.cwiseMin(w);
        hi = hi.cwiseMax(w);
    }
    return {lo, hi};
}

}  // namespace fractop

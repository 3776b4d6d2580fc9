#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"

namespace kzlayout {

struct RegressionFit {
    std::vector<double> beta;  // beta[j] multiplies c^j
    double r_squared = 0.0;

    double operator()(double c) const {
        double y = 0.0;
        for (std::size_t j = beta.size(); j-- > 0;) y = y * c + beta[j];
        return y;
    }
};

using DataPoint = std::pair<double, double>;  // (c, T)

/// Ordinary least squares for T(c) = beta0 + beta1 c + ... + betaK c^K.
/// The abscissae are scaled to [-1, 1] before the Householder solve and the
/// coefficients mapped back afterwards.
inline RegressionFit fit_polynomial(std::span<const DataPoint> points, std::size_t degree = 3) {
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.first);
    if (distinct.size() < degree + 1)
        throw std::invalid_argument("fit needs at least " + std::to_string(degree + 1) +
                                    " distinct abscissae, got " + std::to_string(distinct.size()));

    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, std::abs(p.first));
    if (scale == 0.0) scale = 1.0;

    const std::size_t cols = degree + 1;
    DenseMatrix x(points.size(), cols);
    std::vector<double> y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double t = points[i].first / scale;
        double pw = 1.0;
        for (std::size_t j = 0; j < cols; ++j, pw *= t) x(i, j) = pw;
        y[i] = points[i].second;
    }

    RegressionFit fit;
    fit.beta = least_squares_min_norm(x, y);
    double unscale = 1.0;
    for (auto& b : fit.beta) {
        b /= unscale;
        unscale *= scale;
    }

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0, ss_y = 0.0;
    for (const auto& p : points) {
        const double e = p.second - fit(p.first);
        ss_res += e * e;
        ss_tot += (p.second - mean) * (p.second - mean);
        ss_y += p.second * p.second;
    }
    if (ss_tot == 0.0)
        fit.r_squared = ss_res <= 1e-20 * (1.0 + ss_y) ? 1.0 : 0.0;
    else
        fit.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    return fit;
}

inline RegressionFit fit_cubic(std::span<const DataPoint> points) {
    return fit_polynomial(points, 3);
}

}  // namespace kzlayout

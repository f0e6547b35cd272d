#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ireg/grid.hpp"
#include "ireg/kernel.hpp"

namespace ireg::testing {

inline ScalarImage random_image(const Grid2D &g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarImage img(g);
    for (double &v : img.values) {
        v = u(rng);
    }
    return img;
}

inline VectorField2D random_field(const Grid2D &g, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    VectorField2D vf(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        vf.vx[k] = n(rng);
        vf.vy[k] = n(rng);
    }
    return vf;
}

// Smooth bump supported well inside the domain; used as a registration template.
inline ScalarImage gaussian_blob(const Grid2D &g, double cx, double cy, double width, double height = 1.0) {
    ScalarImage img(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double dx = g.x(i) - cx;
            const double dy = g.y(j) - cy;
            img.at(i, j) = height * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
    }
    return img;
}

inline double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

inline double l2_norm(const std::vector<double> &a) {
    double s = 0.0;
    for (double v : a) {
        s += v * v;
    }
    return std::sqrt(s);
}

} // namespace ireg::testing

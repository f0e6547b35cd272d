#include "ireg/tv.hpp"

#include <cmath>
#include <random>

#include "ireg/error.hpp"

namespace ireg {

namespace {

struct GradientField {
    std::vector<double> gx;
    std::vector<double> gy;
};

// Forward differences, zero on the last column/row (Neumann).
GradientField forward_grad(const Grid2D &g, const std::vector<double> &f) {
    GradientField d{std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
    const double hx = g.hx();
    const double hy = g.hy();
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (i + 1 < g.nx) {
                d.gx[k] = (f[k + 1] - f[k]) / hx;
            }
            if (j + 1 < g.ny) {
                d.gy[k] = (f[k + g.nx] - f[k]) / hy;
            }
        }
    }
    return d;
}

// Euclidean transpose of forward_grad, added into out.
void forward_grad_transpose_add(const Grid2D &g, const GradientField &d, std::vector<double> &out) {
    const double hx = g.hx();
    const double hy = g.hy();
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (i + 1 < g.nx) {
                out[k] -= d.gx[k] / hx;
                out[k + 1] += d.gx[k] / hx;
            }
            if (j + 1 < g.ny) {
                out[k] -= d.gy[k] / hy;
                out[k + g.nx] += d.gy[k] / hy;
            }
        }
    }
}

// Euclidean (unweighted) forward projection and its transpose.
std::vector<double> project(const Grid2D &grid, const SinogramGeometry &geom, const std::vector<double> &f) {
    return ray_transform(ScalarImage(grid, f), geom).values;
}

std::vector<double> project_transpose(const Grid2D &grid, const SinogramGeometry &geom,
                                      const std::vector<double> &y) {
    ScalarImage bp = back_projection(Sinogram(geom, y), grid);
    const double scale = grid.cell_area() / geom.weight();
    for (double &v : bp.values) {
        v *= scale;
    }
    return std::move(bp.values);
}

double norm2(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

template <class Apply>
double power_iteration(std::size_t n, std::uint64_t seed, Apply &&apply_normal) {
    std::mt19937_64 rng(seed);
    std::vector<double> x(n);
    for (double &v : x) {
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    }
    double nx = norm2(x);
    for (double &v : x) {
        v /= nx;
    }
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        std::vector<double> y = apply_normal(x);
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            dot += x[k] * y[k];
        }
        lambda = dot;
        const double ny = norm2(y);
        if (!(ny > 0.0)) {
            break;
        }
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = y[k] / ny;
        }
    }
    return std::sqrt(std::max(lambda, 0.0));
}

} // namespace

double total_variation(const ScalarImage &f) {
    const GradientField d = forward_grad(f.grid, f.values);
    double s = 0.0;
    for (std::size_t k = 0; k < d.gx.size(); ++k) {
        s += std::hypot(d.gx[k], d.gy[k]);
    }
    return s * f.grid.cell_area();
}

double tv_objective(const ScalarImage &f, const Sinogram &data, double mu) {
    Sinogram r = ray_transform(f, data.geometry);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        r.values[k] -= data.values[k];
    }
    return mu * total_variation(f) + inner_product(r, r);
}

double operator_norm_estimate(const SinogramGeometry &geom, const Grid2D &grid, std::uint64_t seed) {
    return power_iteration(grid.size(), seed, [&](const std::vector<double> &x) {
        std::vector<double> y = project_transpose(grid, geom, project(grid, geom, x));
        forward_grad_transpose_add(grid, forward_grad(grid, x), y);
        return y;
    });
}

double gradient_norm_estimate(const Grid2D &grid, std::uint64_t seed) {
    return power_iteration(grid.size(), seed, [&](const std::vector<double> &x) {
        std::vector<double> y(x.size(), 0.0);
        forward_grad_transpose_add(grid, forward_grad(grid, x), y);
        return y;
    });
}

TVResult tv_reconstruct_detailed(const Sinogram &data, const Grid2D &grid, const TVConfig &cfg) {
    if (!(cfg.mu > 0.0)) {
        throw ConfigError("tv.mu must be > 0");
    }
    if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
        throw ConfigError("tv.theta must lie in [0, 1]");
    }
    const SinogramGeometry &geom = data.geometry;
    TVResult result;
    result.operator_norm = operator_norm_estimate(geom, grid);
    double tau = cfg.tau;
    double sigma = cfg.sigma_pd;
    if (tau == 0.0 && sigma == 0.0) {
        tau = sigma = 0.99 / result.operator_norm;
    }
    if (!(tau > 0.0) || !(sigma > 0.0) || tau * sigma * result.operator_norm * result.operator_norm > 1.0) {
        throw ConfigError("tv step sizes violate tau * sigma * ||A||^2 <= 1");
    }

    const double wy = geom.weight();
    const double bound = cfg.mu * grid.cell_area();
    const std::size_t n = grid.size();
    std::vector<double> f(n, 0.0);
    std::vector<double> fbar(n, 0.0);
    std::vector<double> y(geom.size(), 0.0);
    GradientField z{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const double denom = 1.0 + sigma / (2.0 * wy);

    for (std::size_t it = 0; it < cfg.n_iters; ++it) {
        const std::vector<double> af = project(grid, geom, fbar);
        for (std::size_t k = 0; k < y.size(); ++k) {
            y[k] = (y[k] + sigma * af[k] - sigma * data.values[k]) / denom;
        }
        const GradientField df = forward_grad(grid, fbar);
        for (std::size_t k = 0; k < n; ++k) {
            const double qx = z.gx[k] + sigma * df.gx[k];
            const double qy = z.gy[k] + sigma * df.gy[k];
            const double mag = std::hypot(qx, qy);
            const double shrink = mag > bound ? bound / mag : 1.0;
            z.gx[k] = qx * shrink;
            z.gy[k] = qy * shrink;
        }
        std::vector<double> adj = project_transpose(grid, geom, y);
        forward_grad_transpose_add(grid, z, adj);
        for (std::size_t k = 0; k < n; ++k) {
            const double next = f[k] - tau * adj[k];
            fbar[k] = next + cfg.theta * (next - f[k]);
            f[k] = next;
        }
        if (cfg.objective_every > 0 && (it + 1) % cfg.objective_every == 0) {
            result.objective_trace.emplace_back(it + 1, tv_objective(ScalarImage(grid, f), data, cfg.mu));
        }
    }
    result.image = ScalarImage(grid, std::move(f));
    return result;
}

ScalarImage tv_reconstruct(const Sinogram &data, const Grid2D &grid, const TVConfig &cfg) {
    return tv_reconstruct_detailed(data, grid, cfg).image;
}

} // namespace ireg

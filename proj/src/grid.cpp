#include "ireg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ireg/error.hpp"

namespace ireg {

Grid2D::Grid2D(std::size_t nx_, std::size_t ny_, double x_min_, double x_max_, double y_min_, double y_max_)
    : nx(nx_), ny(ny_), x_min(x_min_), x_max(x_max_), y_min(y_min_), y_max(y_max_) {
    if (nx < 2 || ny < 2) {
        throw ConfigError("grid needs at least 2 pixels per axis, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
    }
    if (!(x_max > x_min) || !(y_max > y_min)) {
        throw ConfigError("grid extent must be positive in both axes");
    }
}

Grid2D Grid2D::square(std::size_t n, double half_extent) {
    return Grid2D(n, n, -half_extent, half_extent, -half_extent, half_extent);
}

ScalarImage::ScalarImage(const Grid2D &g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw ConfigError("image value count does not match grid size");
    }
}

TimeVelocityField::TimeVelocityField(const Grid2D &g, std::size_t n) : n_steps(n) {
    if (n == 0) {
        throw ConfigError("time velocity field needs N >= 1");
    }
    fields.assign(n + 1, VectorField2D(g));
}


namespace {

// Four lattice nodes around a physical point with their bilinear weights and
// the weights of the exact x/y derivatives of the interpolant. Nodes outside
// the lattice are either dropped (zero extension) or clamped to the edge.
struct Stencil {
    std::size_t node[4] = {0, 0, 0, 0};
    bool valid[4] = {false, false, false, false};
    double w[4] = {0.0, 0.0, 0.0, 0.0};
    double wx[4] = {0.0, 0.0, 0.0, 0.0};
    double wy[4] = {0.0, 0.0, 0.0, 0.0};
};

Stencil make_stencil(const Grid2D &g, double x, double y, Extension ext) {
    Stencil st;
    const double u = (x - g.x_min) / g.hx() - 0.5;
    const double v = (y - g.y_min) / g.hy() - 0.5;
    if (!std::isfinite(u) || !std::isfinite(v)) {
        return st;
    }
    // Far outside the lattice: avoid overflow in the integer conversion.
    const double lim = static_cast<double>(g.nx + g.ny) + 2.0;
    if (ext == Extension::Zero && (u < -2.0 || v < -2.0 || u > lim || v > lim)) {
        return st;
    }
    const double uc = std::fmin(std::fmax(u, -2.0), lim);
    const double vc = std::fmin(std::fmax(v, -2.0), lim);
    const double fu = std::floor(uc);
    const double fv = std::floor(vc);
    const long i0 = static_cast<long>(fu);
    const long j0 = static_cast<long>(fv);
    const double ax = uc - fu;
    const double ay = vc - fv;
    const long nx = static_cast<long>(g.nx);
    const long ny = static_cast<long>(g.ny);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    for (int c = 0; c < 4; ++c) {
        const long di = c & 1;
        const long dj = c >> 1;
        long i = i0 + di;
        long j = j0 + dj;
        if (ext == Extension::Zero) {
            if (i < 0 || j < 0 || i >= nx || j >= ny) {
                continue;
            }
        } else {
            i = i < 0 ? 0 : (i >= nx ? nx - 1 : i);
            j = j < 0 ? 0 : (j >= ny ? ny - 1 : j);
        }
        const double bx = di ? ax : 1.0 - ax;
        const double by = dj ? ay : 1.0 - ay;
        st.valid[c] = true;
        st.node[c] = static_cast<std::size_t>(j * nx + i);
        st.w[c] = bx * by;
        st.wx[c] = (di ? 1.0 : -1.0) * by * ihx;
        st.wy[c] = (dj ? 1.0 : -1.0) * bx * ihy;
    }
    return st;
}

} // namespace

double interpolate(const ScalarImage &img, double x, double y, Extension ext) {
    const Stencil st = make_stencil(img.grid, x, y, ext);
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
        if (st.valid[c]) {
            s += st.w[c] * img.values[st.node[c]];
        }
    }
    return s;
}

VectorField2D sample_bilinear_gradient(const ScalarImage &img, const DisplacementMap &points, Extension ext) {
    if (!(img.grid == points.grid)) {
        throw ConfigError("sample_bilinear_gradient: image and displacement map live on different grids");
    }
    const Grid2D &g = points.grid;
    VectorField2D out(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            const Stencil st = make_stencil(g, g.x(i) + points.dx[k], y + points.dy[k], ext);
            double sx = 0.0;
            double sy = 0.0;
            for (int c = 0; c < 4; ++c) {
                if (st.valid[c]) {
                    sx += st.wx[c] * img.values[st.node[c]];
                    sy += st.wy[c] * img.values[st.node[c]];
                }
            }
            out.vx[k] = sx;
            out.vy[k] = sy;
        }
    }
    return out;
}

ScalarImage sample_bilinear_transpose(const ScalarImage &values, const DisplacementMap &points, Extension ext) {
    if (!(values.grid == points.grid)) {
        throw ConfigError("sample_bilinear_transpose: values and displacement map live on different grids");
    }
    const Grid2D &g = points.grid;
    ScalarImage out(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double val = values.values[k];
            if (val == 0.0) {
                continue;
            }
            const Stencil st = make_stencil(g, g.x(i) + points.dx[k], y + points.dy[k], ext);
            for (int c = 0; c < 4; ++c) {
                if (st.valid[c]) {
                    out.values[st.node[c]] += st.w[c] * val;
                }
            }
        }
    }
    return out;
}

ScalarImage sample_bilinear(const ScalarImage &img, const DisplacementMap &points, Extension ext) {
    if (!(img.grid == points.grid)) {
        throw ConfigError("sample_bilinear: image and displacement map live on different grids");
    }
    const Grid2D &g = points.grid;
    ScalarImage out(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            out.values[k] = interpolate(img, g.x(i) + points.dx[k], y + points.dy[k], ext);
        }
    }
    return out;
}

ScalarImage sample_bilinear(const ScalarImage &img, std::span<const double> xs, std::span<const double> ys,
                            const Grid2D &out_grid, Extension ext) {
    if (xs.size() != out_grid.size() || ys.size() != out_grid.size()) {
        throw ConfigError("sample_bilinear: coordinate count does not match output grid");
    }
    ScalarImage out(out_grid);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out.values[k] = interpolate(img, xs[k], ys[k], ext);
    }
    return out;
}

namespace {

// Derivative along x of a lattice array, written into out.
void diff_x(const Grid2D &g, const std::vector<double> &f, std::vector<double> &out) {
    const double h = g.hx();
    for (std::size_t j = 0; j < g.ny; ++j) {
        const std::size_t row = j * g.nx;
        out[row] = (f[row + 1] - f[row]) / h;
        for (std::size_t i = 1; i + 1 < g.nx; ++i) {
            out[row + i] = (f[row + i + 1] - f[row + i - 1]) / (2.0 * h);
        }
        out[row + g.nx - 1] = (f[row + g.nx - 1] - f[row + g.nx - 2]) / h;
    }
}

void diff_y(const Grid2D &g, const std::vector<double> &f, std::vector<double> &out) {
    const double h = g.hy();
    const std::size_t nx = g.nx;
    const std::size_t last = (g.ny - 1) * nx;
    for (std::size_t i = 0; i < nx; ++i) {
        out[i] = (f[nx + i] - f[i]) / h;
        out[last + i] = (f[last + i] - f[last - nx + i]) / h;
    }
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            out[j * nx + i] = (f[(j + 1) * nx + i] - f[(j - 1) * nx + i]) / (2.0 * h);
        }
    }
}

} // namespace

VectorField2D gradient(const ScalarImage &img) {
    VectorField2D out(img.grid);
    diff_x(img.grid, img.values, out.vx);
    diff_y(img.grid, img.values, out.vy);
    return out;
}

ScalarImage divergence(const VectorField2D &vf) {
    ScalarImage out(vf.grid);
    std::vector<double> tmp(vf.grid.size());
    diff_x(vf.grid, vf.vx, out.values);
    diff_y(vf.grid, vf.vy, tmp);
    for (std::size_t k = 0; k < tmp.size(); ++k) {
        out.values[k] += tmp[k];
    }
    return out;
}

namespace {

// Transposes of diff_x and diff_y as plain matrices.
void diff_x_transpose(const Grid2D &g, const std::vector<double> &f, std::vector<double> &out) {
    const double h = g.hx();
    const std::size_t nx = g.nx;
    for (std::size_t j = 0; j < g.ny; ++j) {
        const std::size_t row = j * nx;
        for (std::size_t i = 0; i < nx; ++i) {
            out[row + i] = 0.0;
        }
        out[row + 1] += f[row] / h;
        out[row] -= f[row] / h;
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            out[row + i + 1] += f[row + i] / (2.0 * h);
            out[row + i - 1] -= f[row + i] / (2.0 * h);
        }
        out[row + nx - 1] += f[row + nx - 1] / h;
        out[row + nx - 2] -= f[row + nx - 1] / h;
    }
}

void diff_y_transpose(const Grid2D &g, const std::vector<double> &f, std::vector<double> &out) {
    const double h = g.hy();
    const std::size_t nx = g.nx;
    const std::size_t last = (g.ny - 1) * nx;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        out[nx + i] += f[i] / h;
        out[i] -= f[i] / h;
        out[last + i] += f[last + i] / h;
        out[last - nx + i] -= f[last + i] / h;
    }
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            out[(j + 1) * nx + i] += f[j * nx + i] / (2.0 * h);
            out[(j - 1) * nx + i] -= f[j * nx + i] / (2.0 * h);
        }
    }
}

} // namespace

VectorField2D divergence_transpose(const ScalarImage &img) {
    VectorField2D out(img.grid);
    diff_x_transpose(img.grid, img.values, out.vx);
    diff_y_transpose(img.grid, img.values, out.vy);
    return out;
}

double integrate(const ScalarImage &img) {
    double s = 0.0;
    for (double v : img.values) {
        s += v;
    }
    return s * img.grid.cell_area();
}

double inner_product(const ScalarImage &a, const ScalarImage &b) {
    if (!(a.grid == b.grid)) {
        throw ConfigError("inner_product: grid mismatch");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        s += a.values[k] * b.values[k];
    }
    return s * a.grid.cell_area();
}

double inner_product(const VectorField2D &a, const VectorField2D &b) {
    if (!(a.grid == b.grid)) {
        throw ConfigError("inner_product: grid mismatch");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.vx.size(); ++k) {
        s += a.vx[k] * b.vx[k] + a.vy[k] * b.vy[k];
    }
    return s * a.grid.cell_area();
}

bool all_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

} // namespace ireg

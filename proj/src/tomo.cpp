#include "ireg/tomo.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "ireg/error.hpp"

namespace ireg {

SinogramGeometry::SinogramGeometry(std::size_t m, std::size_t p, double smin, double smax, double step,
                                   double half_length)
    : n_angles(m), n_detectors(p), s_min(smin), s_max(smax), ray_step(step), ray_half_length(half_length) {
    if (n_angles < 1) {
        throw ConfigError("sinogram geometry needs at least one angle");
    }
    if (n_detectors < 2) {
        throw ConfigError("sinogram geometry needs at least two detector cells");
    }
    if (!(s_max > s_min)) {
        throw ConfigError("detector extent must be positive");
    }
    if (!(ray_step > 0.0) || !(ray_half_length > 0.0)) {
        throw ConfigError("ray sampling step and length must be positive");
    }
}

SinogramGeometry SinogramGeometry::for_grid(const Grid2D &grid, std::size_t n_angles, std::size_t n_detectors) {
    if (n_detectors < 3) {
        throw ConfigError("need at least 3 detector cells to leave a margin cell on each side");
    }
    const double wx = grid.x_max - grid.x_min;
    const double wy = grid.y_max - grid.y_min;
    const double half_diag = 0.5 * std::hypot(wx, wy);
    const double cx = 0.5 * (grid.x_max + grid.x_min);
    const double cy = 0.5 * (grid.y_max + grid.y_min);
    // s_max = half_diag + hs with hs = 2 s_max / P
    const double p = static_cast<double>(n_detectors);
    const double s_half = half_diag * p / (p - 2.0);
    const double centre_offset = std::hypot(cx, cy);
    if (centre_offset > 0.0) {
        throw ConfigError("for_grid expects a grid centred at the origin");
    }
    const double target_step = 0.5 * std::min(grid.hx(), grid.hy());
    const double n_samples = std::ceil(2.0 * half_diag / target_step);
    const double step = 2.0 * half_diag / n_samples;
    return SinogramGeometry(n_angles, n_detectors, -s_half, s_half, step, half_diag);
}

double SinogramGeometry::angle(std::size_t k) const {
    return static_cast<double>(k) * std::numbers::pi / static_cast<double>(n_angles);
}

double SinogramGeometry::weight() const {
    return detector_spacing() * std::numbers::pi / static_cast<double>(n_angles);
}

Sinogram::Sinogram(const SinogramGeometry &g, std::vector<double> v) : geometry(g), values(std::move(v)) {
    if (values.size() != geometry.size()) {
        throw ConfigError("sinogram value count does not match geometry");
    }
}

namespace {

std::size_t samples_per_ray(const SinogramGeometry &geom) {
    return static_cast<std::size_t>(std::llround(2.0 * geom.ray_half_length / geom.ray_step));
}

// Visits every quadrature sample of every ray, handing the bilinear stencil
// (four lattice indices and weights, only those inside the grid) to the visitor.
template <class Visitor> void for_each_ray_sample(const Grid2D &g, const SinogramGeometry &geom, Visitor &&visit) {
    const std::size_t n_samples = samples_per_ray(geom);
    const double hx = g.hx();
    const double hy = g.hy();
    const long nx = static_cast<long>(g.nx);
    const long ny = static_cast<long>(g.ny);
    for (std::size_t k = 0; k < geom.n_angles; ++k) {
        const double theta = geom.angle(k);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t p = 0; p < geom.n_detectors; ++p) {
            const std::size_t ray = k * geom.n_detectors + p;
            const double off = geom.detector(p);
            for (std::size_t m = 0; m < n_samples; ++m) {
                const double t = -geom.ray_half_length + (static_cast<double>(m) + 0.5) * geom.ray_step;
                const double x = off * c - t * s;
                const double y = off * s + t * c;
                const double u = (x - g.x_min) / hx - 0.5;
                const double v = (y - g.y_min) / hy - 0.5;
                if (u <= -1.0 || v <= -1.0 || u >= static_cast<double>(nx) || v >= static_cast<double>(ny)) {
                    continue;
                }
                const double fu = std::floor(u);
                const double fv = std::floor(v);
                const long i0 = static_cast<long>(fu);
                const long j0 = static_cast<long>(fv);
                const double ax = u - fu;
                const double ay = v - fv;
                const double w[4] = {(1.0 - ax) * (1.0 - ay), ax * (1.0 - ay), (1.0 - ax) * ay, ax * ay};
                const long ii[4] = {i0, i0 + 1, i0, i0 + 1};
                const long jj[4] = {j0, j0, j0 + 1, j0 + 1};
                for (int q = 0; q < 4; ++q) {
                    if (ii[q] >= 0 && ii[q] < nx && jj[q] >= 0 && jj[q] < ny) {
                        visit(ray, static_cast<std::size_t>(jj[q] * nx + ii[q]), w[q]);
                    }
                }
            }
        }
    }
}

} // namespace

Sinogram ray_transform(const ScalarImage &img, const SinogramGeometry &geom) {
    Sinogram out(geom);
    const double step = geom.ray_step;
    const auto &f = img.values;
    auto &g = out.values;
    for_each_ray_sample(img.grid, geom, [&](std::size_t ray, std::size_t pix, double w) { g[ray] += w * f[pix]; });
    for (double &v : g) {
        v *= step;
    }
    return out;
}

ScalarImage back_projection(const Sinogram &sino, const Grid2D &grid) {
    const SinogramGeometry &geom = sino.geometry;
    ScalarImage out(grid);
    auto &f = out.values;
    const auto &g = sino.values;
    for_each_ray_sample(grid, geom, [&](std::size_t ray, std::size_t pix, double w) { f[pix] += w * g[ray]; });
    const double scale = geom.ray_step * geom.weight() / grid.cell_area();
    for (double &v : f) {
        v *= scale;
    }
    return out;
}

double inner_product(const Sinogram &a, const Sinogram &b) {
    if (!(a.geometry == b.geometry)) {
        throw ConfigError("sinogram inner product: geometry mismatch");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        s += a.values[k] * b.values[k];
    }
    return s * a.geometry.weight();
}

ScalarImage fbp(const Sinogram &sino, const Grid2D &grid, double freq_scaling) {
    if (!(freq_scaling > 0.0 && freq_scaling <= 1.0)) {
        throw ConfigError("fbp: freq_scaling must lie in (0, 1]");
    }
    const SinogramGeometry &geom = sino.geometry;
    const std::size_t n_det = geom.n_detectors;
    const double hs = geom.detector_spacing();
    std::size_t len = 1;
    while (len < 2 * n_det) {
        len *= 2;
    }
    detail::RealFFT1D fft(len);

    // Band-limited ramp: spatial kernel h(0) = 1/(4 hs^2), h(n) = -1/(pi n hs)^2 for odd n.
    std::vector<double> kernel(len, 0.0);
    kernel[0] = 1.0 / (4.0 * hs * hs);
    for (std::size_t n = 1; n < len / 2; n += 2) {
        const double val = -1.0 / std::pow(std::numbers::pi * static_cast<double>(n) * hs, 2);
        kernel[n] = val;
        kernel[len - n] = val;
    }
    std::vector<std::complex<double>> kspec;
    fft.forward(kernel, kspec);
    std::vector<double> response(kspec.size());
    const double nyquist_bins = static_cast<double>(len / 2);
    for (std::size_t q = 0; q < kspec.size(); ++q) {
        const double w = static_cast<double>(q) / nyquist_bins; // fraction of Nyquist
        const double window = w <= freq_scaling ? 0.54 + 0.46 * std::cos(std::numbers::pi * w / freq_scaling) : 0.0;
        response[q] = kspec[q].real() * hs * window / static_cast<double>(len);
    }

    std::vector<double> filtered(geom.size());
    std::vector<double> row(len);
    std::vector<std::complex<double>> spec;
    for (std::size_t k = 0; k < geom.n_angles; ++k) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t p = 0; p < n_det; ++p) {
            row[p] = sino.at(k, p);
        }
        fft.forward(row, spec);
        for (std::size_t q = 0; q < spec.size(); ++q) {
            spec[q] *= response[q];
        }
        fft.backward(spec, row);
        for (std::size_t p = 0; p < n_det; ++p) {
            filtered[k * n_det + p] = row[p];
        }
    }

    // Linearly interpolating back projector.
    ScalarImage out(grid);
    const double dtheta = std::numbers::pi / static_cast<double>(geom.n_angles);
    for (std::size_t k = 0; k < geom.n_angles; ++k) {
        const double c = std::cos(geom.angle(k));
        const double s = std::sin(geom.angle(k));
        const double *q = filtered.data() + k * n_det;
        for (std::size_t j = 0; j < grid.ny; ++j) {
            const double y = grid.y(j);
            for (std::size_t i = 0; i < grid.nx; ++i) {
                const double u = (grid.x(i) * c + y * s - geom.s_min) / hs - 0.5;
                const double fu = std::floor(u);
                const long p0 = static_cast<long>(fu);
                const double a = u - fu;
                const double v0 = (p0 >= 0 && p0 < static_cast<long>(n_det)) ? q[p0] : 0.0;
                const double v1 = (p0 + 1 >= 0 && p0 + 1 < static_cast<long>(n_det)) ? q[p0 + 1] : 0.0;
                out.at(i, j) += (1.0 - a) * v0 + a * v1;
            }
        }
    }
    for (double &v : out.values) {
        v *= dtheta;
    }
    return out;
}

} // namespace ireg

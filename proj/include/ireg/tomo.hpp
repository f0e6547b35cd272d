#pragma once

#include <cstddef>
#include <vector>

#include "ireg/grid.hpp"

namespace ireg {

/// 2D parallel-beam acquisition: M angles k*pi/M in [0, pi) and P detector cells.
struct SinogramGeometry {
    std::size_t n_angles = 0;
    std::size_t n_detectors = 0;
    double s_min = 0.0;
    double s_max = 0.0;
    double ray_step = 0.0; // quadrature step along each line
    double ray_half_length = 0.0;

    SinogramGeometry() = default;
    SinogramGeometry(std::size_t n_angles, std::size_t n_detectors, double s_min, double s_max, double ray_step,
                     double ray_half_length);

    /// Detector spans the diagonal of the grid plus one cell of margin per side;
    /// rays are sampled at min(hx, hy) / 2.
    static SinogramGeometry for_grid(const Grid2D &grid, std::size_t n_angles, std::size_t n_detectors);

    double angle(std::size_t k) const;
    double detector_spacing() const { return (s_max - s_min) / static_cast<double>(n_detectors); }
    double detector(std::size_t p) const { return s_min + (static_cast<double>(p) + 0.5) * detector_spacing(); }
    std::size_t size() const { return n_angles * n_detectors; }
    /// Weight of the data-space inner product, hs * pi / M.
    double weight() const;

    bool operator==(const SinogramGeometry &) const = default;
};

/// Angle-major line integrals: values[k * P + p].
struct Sinogram {
    SinogramGeometry geometry;
    std::vector<double> values;

    Sinogram() = default;
    explicit Sinogram(const SinogramGeometry &g, double fill = 0.0) : geometry(g), values(g.size(), fill) {}
    Sinogram(const SinogramGeometry &g, std::vector<double> v);

    double &at(std::size_t k, std::size_t p) { return values[k * geometry.n_detectors + p]; }
    double at(std::size_t k, std::size_t p) const { return values[k * geometry.n_detectors + p]; }
};

/// Line integrals by uniform sampling with bilinear interpolation.
Sinogram ray_transform(const ScalarImage &img, const SinogramGeometry &geom);

/// Exact transpose of ray_transform with respect to the weighted inner products
/// <.,.>_Y (weight hs*pi/M) and <.,.>_X (weight hx*hy).
ScalarImage back_projection(const Sinogram &sino, const Grid2D &grid);

/// Filtered back projection: ramp filter times a Hamming window cut at
/// freq_scaling * Nyquist, then a linearly interpolating back projector.
ScalarImage fbp(const Sinogram &sino, const Grid2D &grid, double freq_scaling);

/// Weighted inner product and norm in data space.
double inner_product(const Sinogram &a, const Sinogram &b);

} // namespace ireg

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ireg {

/// Uniform pixel lattice on the rectangle [x_min,x_max] x [y_min,y_max].
///
/// Values live at pixel centres x_i = x_min + (i + 0.5) hx. Arrays are stored
/// row-major with y outer and x inner, i.e. index = j * nx + i.
struct Grid2D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    /// Throws ConfigError unless nx, ny >= 2 and both extents are positive.
    Grid2D(std::size_t nx, std::size_t ny, double x_min, double x_max, double y_min, double y_max);
    Grid2D() = default;

    /// Square n x n grid on [-half_extent, half_extent]^2.
    static Grid2D square(std::size_t n, double half_extent = 16.0);

    double hx() const { return (x_max - x_min) / static_cast<double>(nx); }
    double hy() const { return (y_max - y_min) / static_cast<double>(ny); }
    double cell_area() const { return hx() * hy(); }
    double x(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * hx(); }
    double y(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * hy(); }
    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

    bool operator==(const Grid2D &) const = default;
};

struct ScalarImage {
    Grid2D grid;
    std::vector<double> values;

    ScalarImage() = default;
    explicit ScalarImage(const Grid2D &g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarImage(const Grid2D &g, std::vector<double> v);

    double &at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
};

struct VectorField2D {
    Grid2D grid;
    std::vector<double> vx;
    std::vector<double> vy;

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D &g) : grid(g), vx(g.size(), 0.0), vy(g.size(), 0.0) {}
};

/// N+1 samples of a time dependent vector field; sample i sits at t_i = i/N.
struct TimeVelocityField {
    std::size_t n_steps = 0;
    std::vector<VectorField2D> fields;

    TimeVelocityField() = default;
    TimeVelocityField(const Grid2D &g, std::size_t n_steps);

    const Grid2D &grid() const { return fields.front().grid; }
};

/// The map x -> x + (dx, dy)(x), sampled at pixel centres.
struct DisplacementMap {
    Grid2D grid;
    std::vector<double> dx;
    std::vector<double> dy;

    DisplacementMap() = default;
    explicit DisplacementMap(const Grid2D &g) : grid(g), dx(g.size(), 0.0), dy(g.size(), 0.0) {}
};

/// How samples outside the pixel-centre lattice are extended.
enum class Extension {
    Zero,      // images are compactly supported; outside values are 0
    Replicate, // nearest edge value, used for Jacobian determinants
};

/// Bilinear interpolation of img at the physical point (x, y).
double interpolate(const ScalarImage &img, double x, double y, Extension ext = Extension::Zero);

/// Samples img at the points x + d(x) for every pixel centre x of the map.
ScalarImage sample_bilinear(const ScalarImage &img, const DisplacementMap &points,
                            Extension ext = Extension::Zero);

/// Samples img at the arbitrary physical coordinates (xs[k], ys[k]); the output lives on out_grid.
ScalarImage sample_bilinear(const ScalarImage &img, std::span<const double> xs, std::span<const double> ys,
                            const Grid2D &out_grid, Extension ext = Extension::Zero);

/// Exact derivative of the bilinear interpolant of img at the points x + d(x).
/// On cell edges the derivative of the cell above/right of the point is used.
VectorField2D sample_bilinear_gradient(const ScalarImage &img, const DisplacementMap &points,
                                       Extension ext = Extension::Zero);

/// Matrix transpose of sample_bilinear: scatters values[k] onto the four
/// lattice nodes that sampling point k reads from, with the same weights.
ScalarImage sample_bilinear_transpose(const ScalarImage &values, const DisplacementMap &points,
                                      Extension ext = Extension::Zero);

/// Central differences inside, one-sided differences on the outer rows and columns.
VectorField2D gradient(const ScalarImage &img);

/// d/dx vx + d/dy vy with the same stencil as gradient().
ScalarImage divergence(const VectorField2D &vf);

/// Matrix transpose of divergence() (grid weights cancel, so no hx*hy factors).
VectorField2D divergence_transpose(const ScalarImage &img);

/// Midpoint quadrature: sum(values) * hx * hy.
double integrate(const ScalarImage &img);

/// L2 inner products weighted by the cell area.
double inner_product(const ScalarImage &a, const ScalarImage &b);
double inner_product(const VectorField2D &a, const VectorField2D &b);

bool all_finite(std::span<const double> values);

} // namespace ireg

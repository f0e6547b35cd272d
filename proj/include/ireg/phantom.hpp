#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ireg/grid.hpp"
#include "ireg/tomo.hpp"

namespace ireg {

enum class PhantomKind {
    SheppLogan,
    SheppLoganMissingObject, // the top blob (ellipse index 4) removed
    SheppLoganExtraObject,   // an additional bright ellipse in the upper left
    SheppLoganDeformed,      // smoothly perturbed ellipse geometry; registration template
    SingleStarTemplate,
    SingleStarTarget,
    SixStarsTemplate,
    SixStarsTarget,
};

std::string to_string(PhantomKind kind);
/// Names as accepted by the CLI: shepp-logan, shepp-logan-missing, shepp-logan-extra,
/// shepp-logan-deformed, star-template, star-target, six-stars-template, six-stars-target.
PhantomKind parse_phantom_kind(std::string_view name);

/// One ellipse of the Shepp-Logan family in normalised coordinates [-1,1]^2.
struct Ellipse {
    double value;
    double axis_x;
    double axis_y;
    double x0;
    double y0;
    double rotation_deg;
};

/// Toft's modified Shepp-Logan table (grey values in [0, 1]).
const std::array<Ellipse, 10> &shepp_logan_ellipses();

/// Ellipse list used by a Shepp-Logan style kind.
std::vector<Ellipse> ellipses_for(PhantomKind kind);

struct PhantomSpec {
    PhantomKind kind = PhantomKind::SheppLogan;
    Grid2D grid;
};

/// Point-sampled analytic rasterization at pixel centres, clamped to [0, 1].
/// Normalised coordinates are mapped onto the grid extent.
ScalarImage make_phantom(const PhantomSpec &spec);

/// Additive white Gaussian noise scaled to a realised SNR.
struct NoiseSpec {
    double target_snr_db = std::numeric_limits<double>::infinity(); // infinity = no noise
    std::uint64_t seed = 0;
};

/// Portable standard-normal stream: mt19937_64, 53-bit uniforms, Box-Muller
/// (cosine branch, then sine branch). Identical on every platform.
std::vector<double> standard_normal(std::size_t count, std::uint64_t seed);

/// Adds noise whose mean-subtracted energy is exactly the level that gives
/// target_snr_db. Throws ConfigError on a constant sinogram.
Sinogram add_noise(const Sinogram &sino, const NoiseSpec &spec);

/// Polygon membership (even-odd rule) for a closed vertex list.
bool inside_polygon(std::span<const std::array<double, 2>> vertices, double x, double y);

/// Star polygon with n_points tips alternating between outer and inner radius.
std::vector<std::array<double, 2>> star_polygon(double cx, double cy, double r_outer, double r_inner,
                                                std::size_t n_points, double rotation_rad);

} // namespace ireg

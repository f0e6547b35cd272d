#include "ireg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ireg/error.hpp"

namespace ireg {

namespace {

struct KindName {
    PhantomKind kind;
    const char *name;
};

constexpr KindName kKindNames[] = {
    {PhantomKind::SheppLogan, "shepp-logan"},
    {PhantomKind::SheppLoganMissingObject, "shepp-logan-missing"},
    {PhantomKind::SheppLoganExtraObject, "shepp-logan-extra"},
    {PhantomKind::SheppLoganDeformed, "shepp-logan-deformed"},
    {PhantomKind::SingleStarTemplate, "star-template"},
    {PhantomKind::SingleStarTarget, "star-target"},
    {PhantomKind::SixStarsTemplate, "six-stars-template"},
    {PhantomKind::SixStarsTarget, "six-stars-target"},
};

// Index of the ellipse dropped by the missing-object variant (the upper blob).
constexpr std::size_t kMissingEllipse = 4;

// Bright object added by the extra-object variant; sits in the grey interior
// clear of every other ellipse.
constexpr Ellipse kExtraEllipse{0.7, 0.09, 0.07, -0.38, 0.50, 0.0};

// Template geometry for the Shepp-Logan registration suites: same grey values
// and skull thickness, every ellipse moved, resized or rotated a little.
constexpr std::array<Ellipse, 10> kDeformedEllipses{{
    {1.0, 0.7200, 0.8900, 0.00, 0.0200, 0.0},
    {-0.8, 0.6924, 0.8440, 0.00, 0.0016, 0.0},
    {-0.2, 0.1300, 0.2800, 0.24, 0.0200, -12.0},
    {-0.2, 0.1400, 0.3800, -0.21, 0.0200, 22.0},
    {0.1, 0.1800, 0.2200, 0.03, 0.3300, 0.0},
    {0.1, 0.0500, 0.0500, 0.00, 0.1200, 0.0},
    {0.1, 0.0460, 0.0460, 0.02, -0.0800, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.5850, 0.0},
    {0.1, 0.0230, 0.0230, 0.00, -0.5860, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.5850, 0.0},
}};

bool inside_ellipse(const Ellipse &e, double x, double y) {
    const double phi = e.rotation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double dx = x - e.x0;
    const double dy = y - e.y0;
    const double u = c * dx + s * dy;
    const double v = -s * dx + c * dy;
    return (u * u) / (e.axis_x * e.axis_x) + (v * v) / (e.axis_y * e.axis_y) <= 1.0;
}

using Polygon = std::vector<std::array<double, 2>>;

// Star scenes in physical units on the [-16,16]^2 domain; scaled when the grid differs.
std::vector<Polygon> star_scene(PhantomKind kind) {
    std::vector<Polygon> out;
    switch (kind) {
    case PhantomKind::SingleStarTemplate:
        // A round blob: 40-gon of radius 7.
        out.push_back(star_polygon(0.0, 0.0, 7.0, 7.0, 20, 0.0));
        break;
    case PhantomKind::SingleStarTarget:
        out.push_back(star_polygon(0.0, 0.0, 10.0, 5.0, 5, std::numbers::pi / 2.0));
        break;
    case PhantomKind::SixStarsTemplate:
    case PhantomKind::SixStarsTarget: {
        const bool target = kind == PhantomKind::SixStarsTarget;
        for (int k = 0; k < 6; ++k) {
            const double a = std::numbers::pi / 3.0 * k + std::numbers::pi / 6.0;
            const double ring = target ? 9.5 : 9.0;
            const double cx = ring * std::cos(a);
            const double cy = ring * std::sin(a);
            if (target) {
                out.push_back(star_polygon(cx, cy, 4.0, 2.0, 3 + static_cast<std::size_t>(k % 3), a));
            } else {
                out.push_back(star_polygon(cx, cy, 2.6, 2.6, 12, 0.0));
            }
        }
        break;
    }
    default:
        break;
    }
    return out;
}

} // namespace

std::string to_string(PhantomKind kind) {
    for (const auto &kn : kKindNames) {
        if (kn.kind == kind) {
            return kn.name;
        }
    }
    return "unknown";
}

PhantomKind parse_phantom_kind(std::string_view name) {
    for (const auto &kn : kKindNames) {
        if (name == kn.name) {
            return kn.kind;
        }
    }
    throw ConfigError("unknown phantom kind '" + std::string(name) + "'");
}

const std::array<Ellipse, 10> &shepp_logan_ellipses() {
    static const std::array<Ellipse, 10> table{{
        {1.0, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
        {-0.8, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
        {0.1, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
        {0.1, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
        {0.1, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
        {0.1, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
    }};
    return table;
}

std::vector<Ellipse> ellipses_for(PhantomKind kind) {
    const auto &base = shepp_logan_ellipses();
    switch (kind) {
    case PhantomKind::SheppLogan:
        return {base.begin(), base.end()};
    case PhantomKind::SheppLoganMissingObject: {
        std::vector<Ellipse> out;
        for (std::size_t k = 0; k < base.size(); ++k) {
            if (k != kMissingEllipse) {
                out.push_back(base[k]);
            }
        }
        return out;
    }
    case PhantomKind::SheppLoganExtraObject: {
        std::vector<Ellipse> out(base.begin(), base.end());
        out.push_back(kExtraEllipse);
        return out;
    }
    case PhantomKind::SheppLoganDeformed:
        return {kDeformedEllipses.begin(), kDeformedEllipses.end()};
    default:
        return {};
    }
}

ScalarImage make_phantom(const PhantomSpec &spec) {
    const Grid2D &g = spec.grid;
    ScalarImage out(g);
    const double half_x = 0.5 * (g.x_max - g.x_min);
    const double half_y = 0.5 * (g.y_max - g.y_min);
    const double cx = 0.5 * (g.x_max + g.x_min);
    const double cy = 0.5 * (g.y_max + g.y_min);
    const std::vector<Ellipse> ellipses = ellipses_for(spec.kind);
    if (!ellipses.empty()) {
        for (std::size_t j = 0; j < g.ny; ++j) {
            const double yn = (g.y(j) - cy) / half_y;
            for (std::size_t i = 0; i < g.nx; ++i) {
                const double xn = (g.x(i) - cx) / half_x;
                double v = 0.0;
                for (const Ellipse &e : ellipses) {
                    if (inside_ellipse(e, xn, yn)) {
                        v += e.value;
                    }
                }
                out.at(i, j) = std::clamp(v, 0.0, 1.0);
            }
        }
        return out;
    }
    // Star scenes are laid out for a half-width of 16.
    const double sx = half_x / 16.0;
    const double sy = half_y / 16.0;
    const std::vector<Polygon> polys = star_scene(spec.kind);
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double y = (g.y(j) - cy) / sy;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = (g.x(i) - cx) / sx;
            for (const Polygon &p : polys) {
                if (inside_polygon(p, x, y)) {
                    out.at(i, j) = 1.0;
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<double> standard_normal(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        // (0, 1]: never zero so the logarithm stays finite.
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    };
    std::vector<double> out;
    out.reserve(count + 1);
    while (out.size() < count) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        out.push_back(r * std::cos(t));
        out.push_back(r * std::sin(t));
    }
    out.resize(count);
    return out;
}

Sinogram add_noise(const Sinogram &sino, const NoiseSpec &spec) {
    if (std::isinf(spec.target_snr_db) && spec.target_snr_db > 0.0) {
        return sino;
    }
    if (!std::isfinite(spec.target_snr_db)) {
        throw ConfigError("noise: target SNR must be finite (or +infinity for no noise)");
    }
    const std::size_t n = sino.values.size();
    double mean = 0.0;
    for (double v : sino.values) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double signal_energy = 0.0;
    for (double v : sino.values) {
        signal_energy += (v - mean) * (v - mean);
    }
    if (!(signal_energy > 0.0)) {
        throw ConfigError("noise: sinogram has zero variance, SNR is undefined");
    }
    std::vector<double> noise = standard_normal(n, spec.seed);
    double noise_mean = 0.0;
    for (double v : noise) {
        noise_mean += v;
    }
    noise_mean /= static_cast<double>(n);
    double noise_energy = 0.0;
    for (double v : noise) {
        noise_energy += (v - noise_mean) * (v - noise_mean);
    }
    const double wanted = signal_energy / std::pow(10.0, spec.target_snr_db / 10.0);
    const double scale = std::sqrt(wanted / noise_energy);
    Sinogram out = sino;
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] += scale * noise[k];
    }
    return out;
}

bool inside_polygon(std::span<const std::array<double, 2>> vertices, double x, double y) {
    bool inside = false;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = vertices[i][0], yi = vertices[i][1];
        const double xj = vertices[j][0], yj = vertices[j][1];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
            inside = !inside;
        }
    }
    return inside;
}

std::vector<std::array<double, 2>> star_polygon(double cx, double cy, double r_outer, double r_inner,
                                                std::size_t n_points, double rotation_rad) {
    std::vector<std::array<double, 2>> v;
    v.reserve(2 * n_points);
    for (std::size_t k = 0; k < 2 * n_points; ++k) {
        const double a = rotation_rad + std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_points);
        const double r = (k % 2 == 0) ? r_outer : r_inner;
        v.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return v;
}

} // namespace ireg

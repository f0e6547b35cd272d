#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ireg/error.hpp"
#include "ireg/phantom.hpp"
#include "ireg/tomo.hpp"
#include "support.hpp"

using namespace ireg;
using ireg::testing::gaussian_blob;
using ireg::testing::random_image;

TEST_CASE("geometry for a grid leaves one margin cell per side") {
    const Grid2D g = Grid2D::square(64);
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 10, 92);
    const double half_diag = 16.0 * std::sqrt(2.0);
    CHECK(geom.s_max - geom.detector_spacing() == doctest::Approx(half_diag));
    CHECK(geom.s_min == doctest::Approx(-geom.s_max));
    CHECK(geom.ray_step <= 0.5 * g.hx());
    CHECK(geom.angle(5) == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(geom.weight() == doctest::Approx(geom.detector_spacing() * std::numbers::pi / 10.0));
    CHECK(geom.size() == 920);

    CHECK_THROWS_AS(SinogramGeometry::for_grid(g, 10, 2), ConfigError);
    CHECK_THROWS_AS(SinogramGeometry::for_grid(Grid2D(8, 8, 0, 4, 0, 4), 4, 10), ConfigError);
    CHECK_THROWS_AS(SinogramGeometry(0, 10, -1, 1, 0.1, 1), ConfigError);
    CHECK_THROWS_AS(SinogramGeometry(4, 10, 1, 1, 0.1, 1), ConfigError);
    CHECK_THROWS_AS(Sinogram(geom, std::vector<double>(3)), ConfigError);
}

TEST_CASE("back projection is the adjoint of the ray transform") {
    const Grid2D g = Grid2D::square(32);
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 6, 48);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ScalarImage f = random_image(g, seed);
        Sinogram y(geom);
        const ScalarImage r = random_image(Grid2D(48, 6, 0, 1, 0, 1), seed + 50);
        y.values = r.values;
        const Sinogram tf = ray_transform(f, geom);
        const double lhs = inner_product(tf, y);
        const double rhs = inner_product(f, back_projection(y, g));
        const double scale = std::sqrt(inner_product(tf, tf) * inner_product(y, y));
        CHECK(std::abs(lhs - rhs) / scale <= 1e-12);
    }
}

TEST_CASE("ray transform of a Gaussian matches the analytic Radon transform") {
    // R[exp(-|x|^2 / 2w^2)](theta, s) = sqrt(2 pi) w exp(-s^2 / 2w^2), shifted by <c, omega>.
    const Grid2D g = Grid2D::square(128);
    const double w = 2.0;
    const double cx = 1.5;
    const double cy = -2.0;
    const ScalarImage f = gaussian_blob(g, cx, cy, w);
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 7, 181);
    const Sinogram sino = ray_transform(f, geom);
    double worst = 0.0;
    for (std::size_t k = 0; k < geom.n_angles; ++k) {
        const double th = geom.angle(k);
        const double shift = cx * std::cos(th) + cy * std::sin(th);
        for (std::size_t p = 0; p < geom.n_detectors; ++p) {
            const double s = geom.detector(p) - shift;
            const double exact = std::sqrt(2.0 * std::numbers::pi) * w * std::exp(-s * s / (2.0 * w * w));
            worst = std::max(worst, std::abs(sino.at(k, p) - exact));
        }
    }
    CHECK(worst < 0.01 * std::sqrt(2.0 * std::numbers::pi) * w);
}

TEST_CASE("ray transform of a disk gives chord lengths") {
    const Grid2D g = Grid2D::square(256);
    ScalarImage disk(g);
    const double r = 8.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            disk.at(i, j) = std::hypot(g.x(i), g.y(j)) <= r ? 1.0 : 0.0;
        }
    }
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 4, 64);
    const Sinogram sino = ray_transform(disk, geom);
    for (std::size_t k = 0; k < geom.n_angles; ++k) {
        for (std::size_t p = 0; p < geom.n_detectors; ++p) {
            const double s = geom.detector(p);
            const double chord = std::abs(s) < r ? 2.0 * std::sqrt(r * r - s * s) : 0.0;
            // A pixel-sized boundary blur costs at most a couple of pixels of chord.
            CHECK(std::abs(sino.at(k, p) - chord) < 2.5 * g.hx() + 0.6 * std::sqrt(2.0 * r * g.hx()));
        }
    }
}

TEST_CASE("ray transform integrates mass along every angle") {
    const Grid2D g = Grid2D::square(64);
    const ScalarImage f = gaussian_blob(g, -3.0, 2.0, 2.5);
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 9, 128);
    const Sinogram sino = ray_transform(f, geom);
    for (std::size_t k = 0; k < geom.n_angles; ++k) {
        double s = 0.0;
        for (std::size_t p = 0; p < geom.n_detectors; ++p) {
            s += sino.at(k, p) * geom.detector_spacing();
        }
        CHECK(s == doctest::Approx(integrate(f)).epsilon(2e-3));
    }
}

TEST_CASE("FBP reconstructs a smooth blob") {
    const Grid2D g = Grid2D::square(64);
    const ScalarImage f = gaussian_blob(g, 2.0, -1.0, 3.0);
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 180, 128);
    const ScalarImage rec = fbp(ray_transform(f, geom), g, 1.0);
    double err = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        err += std::pow(rec.values[k] - f.values[k], 2);
        norm += f.values[k] * f.values[k];
    }
    CHECK(std::sqrt(err / norm) < 0.05);
}

TEST_CASE("FBP of Shepp-Logan resembles the phantom") {
    const Grid2D g = Grid2D::square(128);
    const ScalarImage f = make_phantom({PhantomKind::SheppLogan, g});
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 180, 182);
    const ScalarImage rec = fbp(ray_transform(f, geom), g, 0.8);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        num += std::abs(rec.values[k] - f.values[k]);
        den += f.values[k];
    }
    CHECK(num / den < 0.3);
    CHECK_THROWS_AS(fbp(ray_transform(f, geom), g, 0.0), ConfigError);
    CHECK_THROWS_AS(fbp(ray_transform(f, geom), g, 1.5), ConfigError);
}

TEST_CASE("sinogram inner product checks geometry") {
    const Grid2D g = Grid2D::square(16);
    const Sinogram a(SinogramGeometry::for_grid(g, 4, 20), 1.0);
    const Sinogram b(SinogramGeometry::for_grid(g, 5, 20), 1.0);
    CHECK_THROWS_AS(inner_product(a, b), ConfigError);
    CHECK(inner_product(a, a) == doctest::Approx(80.0 * a.geometry.weight()));
}

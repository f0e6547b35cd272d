#include "doctest.h"

#include <cmath>

#include "ireg/action.hpp"
#include "ireg/objective.hpp"
#include "support.hpp"

using namespace ireg;
using ireg::testing::gaussian_blob;
using ireg::testing::random_field;

namespace {

struct FdSetup {
    Grid2D grid = Grid2D::square(16);
    SinogramGeometry geom = SinogramGeometry::for_grid(grid, 4, 24);
    RegistrationConfig cfg;

    explicit FdSetup(GroupAction action) {
        cfg.action = action;
        cfg.n_steps = 5;
        cfg.sigma = 3.0;
        cfg.gamma = 1e-3;
    }

    Objective objective() const {
        const ScalarImage templ = gaussian_blob(grid, -1.0, 0.5, 3.0);
        const ScalarImage target = gaussian_blob(grid, 1.0, -0.5, 3.5);
        return Objective(templ, ray_transform(target, geom), cfg);
    }
};

TimeVelocityField constant_in_time(const VectorField2D &v, std::size_t n) {
    TimeVelocityField out(v.grid, n);
    for (auto &f : out.fields) {
        f = v;
    }
    return out;
}

TimeVelocityField random_in_time(const Grid2D &g, std::size_t n, std::uint64_t seed, double scale) {
    TimeVelocityField out(g, n);
    for (std::size_t i = 0; i <= n; ++i) {
        out.fields[i] = random_field(g, seed * 1000 + i, scale);
    }
    return out;
}

TimeVelocityField axpy(const TimeVelocityField &a, double s, const TimeVelocityField &b) {
    TimeVelocityField out = a;
    for (std::size_t i = 0; i < a.fields.size(); ++i) {
        for (std::size_t k = 0; k < a.fields[i].vx.size(); ++k) {
            out.fields[i].vx[k] += s * b.fields[i].vx[k];
            out.fields[i].vy[k] += s * b.fields[i].vy[k];
        }
    }
    return out;
}

double max_speed(const TimeVelocityField &nu) {
    double m = 0.0;
    for (const auto &f : nu.fields) {
        for (std::size_t k = 0; k < f.vx.size(); ++k) {
            m = std::max(m, std::hypot(f.vx[k], f.vy[k]));
        }
    }
    return m;
}

double directional_fd(const Objective &obj, const TimeVelocityField &a, const TimeVelocityField &xi, double eps) {
    const auto ap = axpy(a, eps, xi);
    const auto am = axpy(a, -eps, xi);
    return (obj.value(ap, obj.velocity(ap)).total - obj.value(am, obj.velocity(am)).total) / (2.0 * eps);
}

} // namespace

TEST_CASE("time weights follow the right-endpoint rule") {
    const auto w = time_weights(4);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == 0.0);
    CHECK(w[2] == doctest::Approx(0.25));
    CHECK(w[4] == doctest::Approx(0.25));
    double s = 0.0;
    for (double v : w) {
        s += v;
    }
    CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("objective at zero velocity is the template discrepancy") {
    FdSetup s(GroupAction::Geometric);
    const Objective obj = s.objective();
    TimeVelocityField zero(s.grid, s.cfg.n_steps);
    const ObjectiveValue v = obj.value(zero, zero);
    CHECK(v.penalty == 0.0);
    CHECK(v.discrepancy == doctest::Approx(data_discrepancy(obj.template_image(), obj.data())));
}

TEST_CASE("gradient matches central differences along time-varying perturbations") {
    for (GroupAction action : {GroupAction::Geometric, GroupAction::MassPreserving}) {
        CAPTURE(to_string(action));
        FdSetup s(action);
        const Objective obj = s.objective();
        // A velocity of a few pixels, far from the linearisation point nu = 0.
        const auto a = random_in_time(s.grid, s.cfg.n_steps, 7, 0.02);
        const auto nu = obj.velocity(a);
        const Evaluation ev = obj.evaluate(a, nu);
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto xi = random_in_time(s.grid, s.cfg.n_steps, 100 + seed, 0.01);
            const double fd = directional_fd(obj, a, xi, 1e-4);
            const double an = time_inner_product(ev.gradient, xi);
            worst = std::max(worst, std::abs(fd - an) / std::abs(fd));
        }
        MESSAGE("worst relative error " << worst << ", max |nu| " << max_speed(nu));
        CHECK(worst <= 1e-3);
    }
}

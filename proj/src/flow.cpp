#include "ireg/flow.hpp"

#include <cmath>
#include <string>

#include "ireg/error.hpp"

namespace ireg {

namespace {

void require_same_grid(const Grid2D &a, const Grid2D &b, const char *what) {
    if (!(a == b)) {
        throw ConfigError(std::string(what) + ": grid mismatch");
    }
}

DisplacementMap scaled_map(const VectorField2D &v, double scale) {
    DisplacementMap map(v.grid);
    for (std::size_t k = 0; k < v.vx.size(); ++k) {
        map.dx[k] = scale * v.vx[k];
        map.dy[k] = scale * v.vy[k];
    }
    return map;
}

double inv_steps(std::size_t n_steps) {
    if (n_steps == 0) {
        throw ConfigError("flow: number of time steps must be >= 1");
    }
    return 1.0 / static_cast<double>(n_steps);
}

void check_jacobian(const ScalarImage &jac, std::size_t i) {
    for (double v : jac.values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw NumericalError("Jacobian determinant became non-positive or non-finite at time index " +
                                 std::to_string(i) + "; reduce the step size or increase the kernel width");
        }
    }
}

void check_finite(const ScalarImage &img, const char *what, std::size_t i) {
    if (!all_finite(img.values)) {
        throw NumericalError(std::string(what) + " became non-finite at time index " + std::to_string(i));
    }
}

} // namespace

DisplacementMap step_forward_map(const VectorField2D &v, std::size_t n_steps) {
    return scaled_map(v, inv_steps(n_steps));
}

ScalarImage advance_transported_template(const ScalarImage &prev, const VectorField2D &v_i, std::size_t n_steps) {
    require_same_grid(prev.grid, v_i.grid, "advance_transported_template");
    return sample_bilinear(prev, scaled_map(v_i, -inv_steps(n_steps)), Extension::Zero);
}

ScalarImage jacobian_recursion_to_one(const ScalarImage &next_jac, const VectorField2D &v_i, std::size_t n_steps) {
    require_same_grid(next_jac.grid, v_i.grid, "jacobian_recursion_to_one");
    const double h = inv_steps(n_steps);
    ScalarImage out = sample_bilinear(next_jac, scaled_map(v_i, h), Extension::Replicate);
    const ScalarImage div = divergence(v_i);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] *= 1.0 + h * div.values[k];
    }
    return out;
}

ScalarImage jacobian_recursion_to_zero(const ScalarImage &prev_jac, const VectorField2D &v_i, std::size_t n_steps) {
    require_same_grid(prev_jac.grid, v_i.grid, "jacobian_recursion_to_zero");
    const double h = inv_steps(n_steps);
    ScalarImage out = sample_bilinear(prev_jac, scaled_map(v_i, -h), Extension::Replicate);
    const ScalarImage div = divergence(v_i);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] *= 1.0 - h * div.values[k];
    }
    return out;
}

ScalarImage backpropagate_field(const ScalarImage &next, const VectorField2D &v_i, std::size_t n_steps) {
    require_same_grid(next.grid, v_i.grid, "backpropagate_field");
    return sample_bilinear(next, scaled_map(v_i, inv_steps(n_steps)), Extension::Zero);
}

DisplacementMap compose_step(const DisplacementMap &prev, const VectorField2D &v_i, std::size_t n_steps) {
    require_same_grid(prev.grid, v_i.grid, "compose_step");
    const double h = inv_steps(n_steps);
    const DisplacementMap back = scaled_map(v_i, -h);
    DisplacementMap out(prev.grid);
    out.dx = sample_bilinear(ScalarImage(prev.grid, prev.dx), back, Extension::Replicate).values;
    out.dy = sample_bilinear(ScalarImage(prev.grid, prev.dy), back, Extension::Replicate).values;
    for (std::size_t k = 0; k < out.dx.size(); ++k) {
        out.dx[k] += back.dx[k];
        out.dy[k] += back.dy[k];
    }
    return out;
}

FlowChain integrate_forward(const ScalarImage &templ, const TimeVelocityField &nu, GroupAction action) {
    const std::size_t n = nu.n_steps;
    if (nu.fields.size() != n + 1) {
        throw ConfigError("integrate_forward: velocity field must hold N+1 samples");
    }
    require_same_grid(templ.grid, nu.grid(), "integrate_forward");
    FlowChain chain;
    chain.action = action;
    chain.n_steps = n;
    chain.displacement.reserve(n + 1);
    chain.displacement.emplace_back(templ.grid);
    chain.transported_template.reserve(n + 1);
    chain.transported_template.push_back(templ);
    if (action == GroupAction::MassPreserving) {
        chain.jacobian.reserve(n + 1);
        chain.jacobian.emplace_back(templ.grid, 1.0);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        if (!all_finite(nu.fields[i].vx) || !all_finite(nu.fields[i].vy)) {
            throw NumericalError("velocity field is non-finite at time index " + std::to_string(i));
        }
        chain.displacement.push_back(compose_step(chain.displacement.back(), nu.fields[i], n));
        chain.transported_template.push_back(sample_bilinear(templ, chain.displacement.back(), Extension::Zero));
        check_finite(chain.transported_template.back(), "transported template", i);
        if (action == GroupAction::MassPreserving) {
            chain.jacobian.push_back(jacobian_recursion_to_zero(chain.jacobian.back(), nu.fields[i], n));
            check_jacobian(chain.jacobian.back(), i);
        }
    }
    return chain;
}

void integrate_backward(FlowChain &chain, const TimeVelocityField &nu, const ScalarImage &data_gradient) {
    const std::size_t n = nu.n_steps;
    if (!chain.forward_done() || chain.n_steps != n || chain.displacement.size() != n + 1) {
        throw StateError("integrate_backward: chain has not been advanced over the same velocity field");
    }
    require_same_grid(data_gradient.grid, nu.grid(), "integrate_backward");
    const Grid2D &g = data_gradient.grid;
    const double h = inv_steps(n);
    const bool mass = chain.action == GroupAction::MassPreserving;
    const ScalarImage &templ = chain.transported_template.front();

    // Sensitivity to the deformed image, split over its factors for the mass-preserving action.
    ScalarImage lam = data_gradient;
    chain.adjoint_jacobian.clear();
    if (mass) {
        // deformed = jacobian[N] * (I o phi_{1,0})
        ScalarImage kap = data_gradient;
        for (std::size_t k = 0; k < lam.values.size(); ++k) {
            lam.values[k] *= chain.jacobian[n].values[k];
            kap.values[k] *= chain.transported_template[n].values[k];
        }
        chain.adjoint_jacobian.assign(n + 1, ScalarImage());
        chain.adjoint_jacobian[n] = std::move(kap);
    }
    chain.adjoint_displacement.assign(n + 1, VectorField2D());
    VectorField2D mu = sample_bilinear_gradient(templ, chain.displacement[n], Extension::Zero);
    for (std::size_t k = 0; k < mu.vx.size(); ++k) {
        mu.vx[k] *= lam.values[k];
        mu.vy[k] *= lam.values[k];
    }
    chain.adjoint_displacement[n] = std::move(mu);

    for (std::size_t i = n; i >= 1; --i) {
        const DisplacementMap back = scaled_map(nu.fields[i], -h);
        const VectorField2D &next = chain.adjoint_displacement[i];
        VectorField2D prev(g);
        prev.vx = sample_bilinear_transpose(ScalarImage(g, next.vx), back, Extension::Replicate).values;
        prev.vy = sample_bilinear_transpose(ScalarImage(g, next.vy), back, Extension::Replicate).values;
        if (!all_finite(prev.vx) || !all_finite(prev.vy)) {
            throw NumericalError("adjoint of the displacement became non-finite at time index " +
                                 std::to_string(i - 1));
        }
        chain.adjoint_displacement[i - 1] = std::move(prev);
        if (mass) {
            ScalarImage weighted = chain.adjoint_jacobian[i];
            const ScalarImage div = divergence(nu.fields[i]);
            for (std::size_t k = 0; k < weighted.values.size(); ++k) {
                weighted.values[k] *= 1.0 - h * div.values[k];
            }
            chain.adjoint_jacobian[i - 1] = sample_bilinear_transpose(weighted, back, Extension::Replicate);
            check_finite(chain.adjoint_jacobian[i - 1], "adjoint of the Jacobian", i - 1);
        }
    }
}

VectorField2D velocity_sensitivity(const FlowChain &chain, const TimeVelocityField &nu, std::size_t i) {
    const std::size_t n = nu.n_steps;
    if (!chain.forward_done() || !chain.backward_done() || chain.n_steps != n) {
        throw StateError("velocity_sensitivity: flow chain is incomplete");
    }
    if (i < 1 || i > n) {
        throw ConfigError("velocity_sensitivity: time index must be in 1..N");
    }
    const Grid2D &g = nu.grid();
    const double h = inv_steps(n);
    const DisplacementMap back = scaled_map(nu.fields[i], -h);
    // d_i = d_{i-1}(x - v/N) - v/N, so dd_i/dv = -(1/N)(Id + Dd_{i-1}(x - v/N)); the
    // 1/N cancels against the time weight.
    const DisplacementMap &prev = chain.displacement[i - 1];
    const VectorField2D ddx = sample_bilinear_gradient(ScalarImage(g, prev.dx), back, Extension::Replicate);
    const VectorField2D ddy = sample_bilinear_gradient(ScalarImage(g, prev.dy), back, Extension::Replicate);
    const VectorField2D &mu = chain.adjoint_displacement[i];
    VectorField2D out(g);
    for (std::size_t k = 0; k < out.vx.size(); ++k) {
        out.vx[k] = -(mu.vx[k] * (1.0 + ddx.vx[k]) + mu.vy[k] * ddy.vx[k]);
        out.vy[k] = -(mu.vx[k] * ddx.vy[k] + mu.vy[k] * (1.0 + ddy.vy[k]));
    }
    if (chain.action == GroupAction::MassPreserving) {
        // jacobian[i] = (1 - div v/N) * (jacobian[i-1] o (Id - v/N))
        const ScalarImage &kap = chain.adjoint_jacobian[i];
        const ScalarImage pulled = sample_bilinear(chain.jacobian[i - 1], back, Extension::Replicate);
        const VectorField2D dpulled = sample_bilinear_gradient(chain.jacobian[i - 1], back, Extension::Replicate);
        const ScalarImage div = divergence(nu.fields[i]);
        ScalarImage kp(g);
        for (std::size_t k = 0; k < kp.values.size(); ++k) {
            kp.values[k] = kap.values[k] * pulled.values[k];
        }
        const VectorField2D dt = divergence_transpose(kp);
        for (std::size_t k = 0; k < out.vx.size(); ++k) {
            const double c = (1.0 - h * div.values[k]) * kap.values[k];
            out.vx[k] -= dt.vx[k] + c * dpulled.vx[k];
            out.vy[k] -= dt.vy[k] + c * dpulled.vy[k];
        }
    }
    return out;
}

} // namespace ireg

#include "ireg/objective.hpp"

#include <cmath>
#include <string>

#include "ireg/action.hpp"
#include "ireg/error.hpp"

namespace ireg {

void RegistrationConfig::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("registration.gamma must be a finite value >= 0");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("registration.sigma must be > 0");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("registration.alpha must be > 0");
    }
    if (n_steps < 1) {
        throw ConfigError("registration.n_steps must be >= 1");
    }
    if (max_iters < 1) {
        throw ConfigError("registration.max_iters must be >= 1");
    }
    if (!(grad_tol >= 0.0)) {
        throw ConfigError("registration.grad_tol must be >= 0");
    }
}

std::vector<double> time_weights(std::size_t n_steps) {
    if (n_steps == 0) {
        throw ConfigError("time_weights: N must be >= 1");
    }
    // Right-endpoint rule: the forward scheme reads v_1..v_N, so v_0 carries no weight.
    std::vector<double> w(n_steps + 1, 1.0 / static_cast<double>(n_steps));
    w.front() = 0.0;
    return w;
}

namespace {

void require_compatible(const ScalarImage &f, const Sinogram &g) {
    if (f.values.size() != f.grid.size() || g.values.size() != g.geometry.size()) {
        throw ConfigError("objective: malformed image or sinogram");
    }
}

void require_same_shape(const TimeVelocityField &a, const TimeVelocityField &b) {
    if (a.n_steps != b.n_steps || a.fields.size() != b.fields.size() || !(a.grid() == b.grid())) {
        throw ConfigError("time velocity fields differ in shape");
    }
}

} // namespace

double data_discrepancy(const ScalarImage &f, const Sinogram &g) {
    require_compatible(f, g);
    Sinogram r = ray_transform(f, g.geometry);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        r.values[k] -= g.values[k];
    }
    return inner_product(r, r);
}

ScalarImage discrepancy_gradient_image(const ScalarImage &f, const Sinogram &g) {
    require_compatible(f, g);
    Sinogram r = ray_transform(f, g.geometry);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        r.values[k] = 2.0 * (r.values[k] - g.values[k]);
    }
    return back_projection(r, f.grid);
}

double velocity_norm_sq(const TimeVelocityField &nu) { return time_inner_product(nu, nu); }

double velocity_norm_sq(const TimeVelocityField &momentum, const TimeVelocityField &nu) {
    return time_inner_product(momentum, nu);
}

double time_inner_product(const TimeVelocityField &a, const TimeVelocityField &b) {
    require_same_shape(a, b);
    const auto w = time_weights(a.n_steps);
    double s = 0.0;
    for (std::size_t i = 0; i < a.fields.size(); ++i) {
        s += w[i] * inner_product(a.fields[i], b.fields[i]);
    }
    return s;
}

TimeVelocityField data_momentum(const FlowChain &chain, const TimeVelocityField &nu) {
    if (!chain.forward_done() || !chain.backward_done() || chain.n_steps != nu.n_steps) {
        throw StateError("data_momentum: flow chain is incomplete");
    }
    TimeVelocityField out(nu.grid(), nu.n_steps);
    for (std::size_t i = 1; i <= nu.n_steps; ++i) {
        out.fields[i] = velocity_sensitivity(chain, nu, i);
    }
    // v_0 has zero weight; giving it the updates of v_1 keeps it a copy of v_1.
    out.fields[0] = out.fields[1];
    return out;
}

TimeVelocityField continuous_data_momentum(const ScalarImage &templ, const TimeVelocityField &nu, GroupAction action,
                                           const ScalarImage &data_gradient) {
    const std::size_t n = nu.n_steps;
    const Grid2D &g = templ.grid;
    const FlowChain fwd = integrate_forward(templ, nu, action);
    std::vector<ScalarImage> bp(n + 1);
    std::vector<ScalarImage> jac1(n + 1);
    bp[n] = data_gradient;
    jac1[n] = ScalarImage(g, 1.0);
    for (std::size_t i = n; i-- > 0;) {
        bp[i] = backpropagate_field(bp[i + 1], nu.fields[i], n);
        if (action == GroupAction::Geometric) {
            jac1[i] = jacobian_recursion_to_one(jac1[i + 1], nu.fields[i], n);
        }
    }
    TimeVelocityField out(g, n);
    for (std::size_t i = 0; i <= n; ++i) {
        VectorField2D &m = out.fields[i];
        if (action == GroupAction::Geometric) {
            const VectorField2D grad = gradient(fwd.transported_template[i]);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double c = -jac1[i].values[k] * bp[i].values[k];
                m.vx[k] = c * grad.vx[k];
                m.vy[k] = c * grad.vy[k];
            }
        } else {
            const VectorField2D grad = gradient(bp[i]);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double c = fwd.jacobian[i].values[k] * fwd.transported_template[i].values[k];
                m.vx[k] = c * grad.vx[k];
                m.vy[k] = c * grad.vy[k];
            }
        }
    }
    return out;
}

namespace {

TimeVelocityField assemble_gradient(const TimeVelocityField &nu, const FlowChain &chain, const KernelSpec &kernel,
                                    double gamma, GroupAction expected) {
    if (chain.action != expected) {
        throw ConfigError("gradient: flow chain was built for the other group action");
    }
    if (chain.n_steps != nu.n_steps || !(kernel.grid() == nu.grid())) {
        throw ConfigError("gradient: chain, kernel and velocity field disagree");
    }
    const TimeVelocityField p = data_momentum(chain, nu);
    TimeVelocityField out(nu.grid(), nu.n_steps);
    for (std::size_t i = 0; i <= nu.n_steps; ++i) {
        const VectorField2D sm = smooth(kernel, p.fields[i]);
        const VectorField2D &v = nu.fields[i];
        VectorField2D &o = out.fields[i];
        for (std::size_t k = 0; k < v.vx.size(); ++k) {
            o.vx[k] = 2.0 * gamma * v.vx[k] + sm.vx[k];
            o.vy[k] = 2.0 * gamma * v.vy[k] + sm.vy[k];
        }
    }
    return out;
}

} // namespace

TimeVelocityField gradient_geometric(const TimeVelocityField &nu, const FlowChain &chain, const KernelSpec &kernel,
                                     double gamma) {
    return assemble_gradient(nu, chain, kernel, gamma, GroupAction::Geometric);
}

TimeVelocityField gradient_mass_preserving(const TimeVelocityField &nu, const FlowChain &chain,
                                           const KernelSpec &kernel, double gamma) {
    return assemble_gradient(nu, chain, kernel, gamma, GroupAction::MassPreserving);
}

Objective::Objective(ScalarImage templ, Sinogram data, const RegistrationConfig &cfg)
    : template_(std::move(templ)), data_(std::move(data)), cfg_(cfg),
      kernel_((cfg.validate(), cfg.sigma), template_.grid, cfg.exponent) {
    if (!all_finite(template_.values)) {
        throw ConfigError("template contains non-finite values");
    }
    if (!all_finite(data_.values)) {
        throw ConfigError("data contains non-finite values");
    }
}

TimeVelocityField Objective::velocity(const TimeVelocityField &momentum) const {
    TimeVelocityField nu(momentum.grid(), momentum.n_steps);
    for (std::size_t i = 0; i < momentum.fields.size(); ++i) {
        nu.fields[i] = smooth(kernel_, momentum.fields[i]);
    }
    return nu;
}

ObjectiveValue Objective::value(const TimeVelocityField &momentum, const TimeVelocityField &nu) const {
    const FlowChain chain = integrate_forward(template_, nu, cfg_.action);
    ObjectiveValue v;
    v.discrepancy = data_discrepancy(deform(cfg_.action, chain), data_);
    v.penalty = cfg_.gamma * velocity_norm_sq(momentum, nu);
    v.total = v.penalty + v.discrepancy;
    return v;
}

Evaluation Objective::evaluate(const TimeVelocityField &momentum, const TimeVelocityField &nu) const {
    Evaluation ev;
    ev.chain = integrate_forward(template_, nu, cfg_.action);
    ev.deformed = deform(cfg_.action, ev.chain);

    Sinogram residual = ray_transform(ev.deformed, data_.geometry);
    for (std::size_t k = 0; k < residual.values.size(); ++k) {
        residual.values[k] -= data_.values[k];
    }
    ev.value.discrepancy = inner_product(residual, residual);
    ev.value.penalty = cfg_.gamma * velocity_norm_sq(momentum, nu);
    ev.value.total = ev.value.penalty + ev.value.discrepancy;
    for (double &r : residual.values) {
        r *= 2.0;
    }
    const ScalarImage data_gradient = back_projection(residual, template_.grid);

    integrate_backward(ev.chain, nu, data_gradient);
    const TimeVelocityField p = data_momentum(ev.chain, nu);

    ev.momentum_gradient = TimeVelocityField(nu.grid(), nu.n_steps);
    ev.gradient = TimeVelocityField(nu.grid(), nu.n_steps);
    const double two_gamma = 2.0 * cfg_.gamma;
    for (std::size_t i = 0; i <= nu.n_steps; ++i) {
        VectorField2D &mg = ev.momentum_gradient.fields[i];
        const VectorField2D &a = momentum.fields[i];
        const VectorField2D &pi = p.fields[i];
        for (std::size_t k = 0; k < a.vx.size(); ++k) {
            mg.vx[k] = two_gamma * a.vx[k] + pi.vx[k];
            mg.vy[k] = two_gamma * a.vy[k] + pi.vy[k];
        }
        ev.gradient.fields[i] = smooth(kernel_, mg);
    }
    ev.gradient_norm_sq = time_inner_product(ev.momentum_gradient, ev.gradient);
    return ev;
}

} // namespace ireg

#include "ireg/optimize.hpp"

#include <cmath>

#include "ireg/error.hpp"

namespace ireg {

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::GradTol:
        return "grad_tol";
    case StopReason::MaxIters:
        return "max_iters";
    case StopReason::NumericalFailure:
        return "numerical_failure";
    }
    return "unknown";
}

namespace {

// x <- x - step * d, fieldwise.
void axpy(TimeVelocityField &x, double step, const TimeVelocityField &d) {
    for (std::size_t i = 0; i < x.fields.size(); ++i) {
        auto &xf = x.fields[i];
        const auto &df = d.fields[i];
        for (std::size_t k = 0; k < xf.vx.size(); ++k) {
            xf.vx[k] -= step * df.vx[k];
            xf.vy[k] -= step * df.vy[k];
        }
    }
}

bool finite_field(const TimeVelocityField &f) {
    for (const auto &v : f.fields) {
        if (!all_finite(v.vx) || !all_finite(v.vy)) {
            return false;
        }
    }
    return true;
}

} // namespace

RegistrationResult register_template(const ScalarImage &templ, const Sinogram &data, const RegistrationConfig &cfg,
                                     const IterationCallback &on_iteration,
                                     const std::optional<TimeVelocityField> &initial_momentum) {
    const Objective objective(templ, data, cfg);

    TimeVelocityField momentum(templ.grid, cfg.n_steps);
    if (initial_momentum) {
        if (initial_momentum->n_steps != cfg.n_steps || !(initial_momentum->grid() == templ.grid)) {
            throw ConfigError("initial momentum does not match the template grid or n_steps");
        }
        momentum = *initial_momentum;
    }
    TimeVelocityField nu = objective.velocity(momentum);

    RegistrationResult result;
    result.stop_reason = StopReason::MaxIters;

    auto record = [&](const Evaluation &ev, std::size_t k) {
        result.objective_history.push_back(ev.value);
        const double gnorm = std::sqrt(std::max(ev.gradient_norm_sq, 0.0));
        result.gradient_norm_history.push_back(gnorm);
        result.trajectory = ev.chain.transported_template;
        result.deformed = ev.deformed;
        result.final_momentum = momentum;
        result.final_velocity = nu;
        if (on_iteration) {
            on_iteration(IterationRecord{k, ev.value, gnorm});
        }
        return gnorm;
    };

    std::size_t k = 0;
    while (true) {
        Evaluation ev;
        try {
            ev = objective.evaluate(momentum, nu);
        } catch (const NumericalError &e) {
            result.stop_reason = StopReason::NumericalFailure;
            result.diagnostic = e.what();
            break;
        }
        if (!std::isfinite(ev.value.total) || !std::isfinite(ev.gradient_norm_sq)) {
            result.stop_reason = StopReason::NumericalFailure;
            result.diagnostic = "objective or gradient became non-finite at iteration " + std::to_string(k);
            break;
        }
        const double gnorm = record(ev, k);
        if (k >= cfg.max_iters) {
            result.stop_reason = StopReason::MaxIters;
            break;
        }
        ++k;
        if (gnorm <= cfg.grad_tol) {
            result.stop_reason = StopReason::GradTol;
            break;
        }

        double step = cfg.alpha;
        TimeVelocityField next_momentum = momentum;
        TimeVelocityField next_nu = nu;
        axpy(next_momentum, step, ev.momentum_gradient);
        axpy(next_nu, step, ev.gradient);
        if (cfg.backtracking) {
            for (int attempt = 0; attempt < 30; ++attempt) {
                bool decreased = false;
                try {
                    decreased = objective.value(next_momentum, next_nu).total < ev.value.total;
                } catch (const NumericalError &) {
                    decreased = false;
                }
                if (decreased) {
                    break;
                }
                step *= 0.5;
                next_momentum = momentum;
                next_nu = nu;
                axpy(next_momentum, step, ev.momentum_gradient);
                axpy(next_nu, step, ev.gradient);
            }
        }
        if (!finite_field(next_momentum) || !finite_field(next_nu)) {
            result.stop_reason = StopReason::NumericalFailure;
            result.diagnostic = "velocity field became non-finite at iteration " + std::to_string(k);
            break;
        }
        momentum = std::move(next_momentum);
        nu = std::move(next_nu);
    }
    result.iterations_run = k;
    if (result.objective_history.empty()) {
        // The initial iterate already failed; report the starting point.
        result.final_momentum = momentum;
        result.final_velocity = nu;
        result.trajectory.assign(cfg.n_steps + 1, templ);
        result.deformed = templ;
    }
    return result;
}

} // namespace ireg

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ireg/config.hpp"
#include "ireg/objective.hpp"
#include "ireg/tomo.hpp"

namespace ireg {

enum class StopReason { GradTol, MaxIters, NumericalFailure };

std::string to_string(StopReason reason);

struct IterationRecord {
    std::size_t iteration = 0;
    ObjectiveValue value;
    double gradient_norm = 0.0;
};

struct RegistrationResult {
    TimeVelocityField final_velocity;
    TimeVelocityField final_momentum;
    std::vector<ScalarImage> trajectory; // I o phi_{t_i,0}, i = 0..N
    ScalarImage deformed;                // W(nu, I) at the final iterate
    std::vector<ObjectiveValue> objective_history;
    std::vector<double> gradient_norm_history;
    std::size_t iterations_run = 0;
    StopReason stop_reason = StopReason::MaxIters;
    std::string diagnostic; // set on NumericalFailure
};

/// Called after every evaluated iterate (for progress logs).
using IterationCallback = std::function<void(const IterationRecord &)>;

/// Gradient descent nu <- nu - alpha grad E(nu) from nu = 0 (or initial_momentum).
///
/// Each iteration evaluates the objective at the current iterate, records it,
/// stops if the gradient norm is <= grad_tol, and otherwise takes a step.
/// objective_history[k] is the objective at nu^k; a run that exhausts max_iters
/// holds max_iters + 1 entries. iterations_run is the number of loop passes:
/// max_iters on exhaustion, 1 when the initial gradient already meets grad_tol.
RegistrationResult register_template(const ScalarImage &templ, const Sinogram &data, const RegistrationConfig &cfg,
                                     const IterationCallback &on_iteration = {},
                                     const std::optional<TimeVelocityField> &initial_momentum = std::nullopt);

} // namespace ireg

#pragma once

#include <cstddef>
#include <cstdint>

#include "ireg/flow.hpp"
#include "ireg/kernel.hpp"

namespace ireg {

/// Hyperparameters of the gradient-descent registration.
struct RegistrationConfig {
    double gamma = 1e-7;     // weight of the deformation penalty, >= 0
    double sigma = 6.0;      // kernel width, > 0
    double alpha = 0.02;     // step size, > 0
    std::size_t n_steps = 20; // time discretization N, >= 1
    std::size_t max_iters = 200;
    double grad_tol = 0.0;   // stop once the gradient norm drops to this value
    GroupAction action = GroupAction::Geometric;
    std::uint64_t seed = 0;  // only used when a random initial field is requested
    KernelExponent exponent = KernelExponent::Squared;
    bool backtracking = false; // halve alpha until the objective decreases; off for paper runs

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

} // namespace ireg

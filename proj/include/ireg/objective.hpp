#pragma once

#include <vector>

#include "ireg/config.hpp"
#include "ireg/flow.hpp"
#include "ireg/kernel.hpp"
#include "ireg/tomo.hpp"

namespace ireg {

struct ObjectiveValue {
    double total = 0.0;
    double penalty = 0.0;      // gamma * ||nu||^2
    double discrepancy = 0.0;  // ||T(W(nu, I)) - g||_Y^2
};

/// Quadrature weights for the N+1 time samples on [0, 1]: 0 for t_0 and 1/N
/// for t_1..t_N, the rule under which the discrete gradient is exact.
std::vector<double> time_weights(std::size_t n_steps);

/// ||T f - g||^2 in the weighted data space.
double data_discrepancy(const ScalarImage &f, const Sinogram &g);

/// 2 T^*(T f - g)
ScalarImage discrepancy_gradient_image(const ScalarImage &f, const Sinogram &g);

/// Time integral of the per-time L2 norms <v_i, v_i> under time_weights().
double velocity_norm_sq(const TimeVelocityField &nu);

/// Squared RKHS norm of nu = smooth(momentum): the time integral of
/// <momentum_i, nu_i>_{L2}, which by the reproducing property equals ||nu_i||_V^2.
double velocity_norm_sq(const TimeVelocityField &momentum, const TimeVelocityField &nu);

/// Discrete product sum_i w_i <a_i, b_i>_{L2}.
double time_inner_product(const TimeVelocityField &a, const TimeVelocityField &b);

/// L2 gradient of the data term with respect to each velocity sample, i.e.
/// the exact derivative of the discretized objective, so that
/// grad E = 2 gamma nu + smooth(result). It discretizes
///   geometric:       -|D phi_{t,1}| (grad L o phi_{t,1}) grad(I o phi_{t,0})
///   mass preserving: +|D phi_{t,0}| (I o phi_{t,0}) grad(grad L o phi_{t,1})
/// Sample 0 repeats sample 1.
TimeVelocityField data_momentum(const FlowChain &chain, const TimeVelocityField &nu);

/// The same integrands evaluated literally on the lattice: Jacobian and
/// back-propagation chains plus central-difference gradients. Converges to
/// data_momentum as the grid and N are refined; kept for comparison.
TimeVelocityField continuous_data_momentum(const ScalarImage &templ, const TimeVelocityField &nu, GroupAction action,
                                           const ScalarImage &data_gradient);

/// 2 gamma nu - smooth(|D phi_{t_i,1}| (grad L o phi_{t_i,1}) grad(I o phi_{t_i,0}))
TimeVelocityField gradient_geometric(const TimeVelocityField &nu, const FlowChain &chain, const KernelSpec &kernel,
                                     double gamma);

/// 2 gamma nu + smooth(|D phi_{t_i,0}| (I o phi_{t_i,0}) grad(grad L o phi_{t_i,1}))
TimeVelocityField gradient_mass_preserving(const TimeVelocityField &nu, const FlowChain &chain,
                                           const KernelSpec &kernel, double gamma);

/// Everything one evaluation of the objective produces.
struct Evaluation {
    ObjectiveValue value;
    FlowChain chain;
    ScalarImage deformed;
    TimeVelocityField momentum_gradient; // 2 gamma a + data_momentum
    TimeVelocityField gradient;          // smooth(momentum_gradient) = grad E in V
    double gradient_norm_sq = 0.0;       // ||grad E||^2 in the discrete V^2 product
};

/// E(nu) = gamma ||nu||_{V^2}^2 + ||T(W(nu, I)) - g||_Y^2 for a fixed template and data.
///
/// Velocity fields are represented through their momentum a with nu = smooth(a),
/// which makes the RKHS norm computable exactly on the grid.
class Objective {
  public:
    Objective(ScalarImage templ, Sinogram data, const RegistrationConfig &cfg);

    const KernelSpec &kernel() const { return kernel_; }
    const ScalarImage &template_image() const { return template_; }
    const Sinogram &data() const { return data_; }
    const RegistrationConfig &config() const { return cfg_; }

    /// nu = smooth(momentum)
    TimeVelocityField velocity(const TimeVelocityField &momentum) const;

    ObjectiveValue value(const TimeVelocityField &momentum, const TimeVelocityField &nu) const;

    /// Value and gradient; throws NumericalError if the flow degenerates.
    Evaluation evaluate(const TimeVelocityField &momentum, const TimeVelocityField &nu) const;

  private:
    ScalarImage template_;
    Sinogram data_;
    RegistrationConfig cfg_;
    KernelSpec kernel_;
};

} // namespace ireg

#pragma once

#include <cstddef>
#include <vector>

#include "ireg/grid.hpp"

namespace ireg {

enum class GroupAction { Geometric, MassPreserving };

/// Chains kept by the gradient-descent scheme.
///
/// Forward sweep (i = 0..N):
///   displacement[i]         = phi_{t_i,0} - Id, built by composing the steps
///                             phi_{t_i,0} = phi_{t_{i-1},0} o (Id - v_i/N)
///   transported_template[i] = I o phi_{t_i,0}, one interpolation of I per sample
///   jacobian[i]             = |D phi_{t_i,0}|  (mass-preserving action only)
/// Backward sweep (i = N..0), the exact adjoint of the forward sweep:
///   adjoint_displacement[i] = sensitivity of E to displacement[i]
///   adjoint_jacobian[i]     = sensitivity of E to jacobian[i] (mass-preserving only)
///
/// Composing maps instead of re-sampling the image keeps the template sharp:
/// the image is interpolated once per time sample rather than i times.
/// adjoint_displacement[i] is the discrete counterpart of
/// |D phi_{t_i,1}| (grad L o phi_{t_i,1}) grad(I o phi_{t_i,0}) pulled back to time 0.
struct FlowChain {
    GroupAction action = GroupAction::Geometric;
    std::size_t n_steps = 0;
    std::vector<DisplacementMap> displacement;
    std::vector<ScalarImage> transported_template;
    std::vector<ScalarImage> jacobian;
    std::vector<VectorField2D> adjoint_displacement;
    std::vector<ScalarImage> adjoint_jacobian;

    bool forward_done() const { return transported_template.size() == n_steps + 1; }
    bool backward_done() const { return adjoint_displacement.size() == n_steps + 1; }
};

/// x -> x + v(x)/N
DisplacementMap step_forward_map(const VectorField2D &v, std::size_t n_steps);

/// d_i = d_{i-1} o (Id - v_i/N) - v_i/N: the displacement of phi_{t_i,0}.
/// Edge values of d_{i-1} are replicated outside the lattice.
DisplacementMap compose_step(const DisplacementMap &prev, const VectorField2D &v_i, std::size_t n_steps);

/// (I o phi_{t_{i-1},0}) o (Id - v_i/N), by semi-Lagrangian pull-back of the image.
ScalarImage advance_transported_template(const ScalarImage &prev, const VectorField2D &v_i, std::size_t n_steps);

/// |D phi_{t_i,1}| = (1 + div v_i / N) * |D phi_{t_{i+1},1}| o (Id + v_i/N)
ScalarImage jacobian_recursion_to_one(const ScalarImage &next_jac, const VectorField2D &v_i, std::size_t n_steps);

/// |D phi_{t_i,0}| = (1 - div v_i / N) * |D phi_{t_{i-1},0}| o (Id - v_i/N)
ScalarImage jacobian_recursion_to_zero(const ScalarImage &prev_jac, const VectorField2D &v_i, std::size_t n_steps);

/// (grad L o phi_{t_{i+1},1}) o (Id + v_i/N)
ScalarImage backpropagate_field(const ScalarImage &next, const VectorField2D &v_i, std::size_t n_steps);

/// Runs the forward sweep i = 1..N: transported templates and, for the
/// mass-preserving action, the Jacobians to time 0.
/// Throws NumericalError when a Jacobian stops being positive or a value is not finite.
FlowChain integrate_forward(const ScalarImage &templ, const TimeVelocityField &nu, GroupAction action);

/// Runs the backward sweep i = N..1 seeded with the data gradient dL, the
/// L2 gradient of the data term with respect to the deformed template.
/// Requires a chain produced by integrate_forward on the same velocity field.
void integrate_backward(FlowChain &chain, const TimeVelocityField &nu, const ScalarImage &data_gradient);

/// Sensitivity of E to the velocity sample v_i (i >= 1) per unit time weight
/// 1/N, after the backward sweep. Sample 0 does not enter the forward scheme.
VectorField2D velocity_sensitivity(const FlowChain &chain, const TimeVelocityField &nu, std::size_t i);

} // namespace ireg

#include "ireg/action.hpp"

#include "ireg/error.hpp"

namespace ireg {

ScalarImage deform(GroupAction action, const FlowChain &chain) {
    if (!chain.forward_done() || chain.n_steps == 0) {
        throw StateError("deform: flow chain has not been advanced to t = 1");
    }
    const ScalarImage &moved = chain.transported_template[chain.n_steps];
    if (action == GroupAction::Geometric) {
        return moved;
    }
    if (chain.action != GroupAction::MassPreserving || chain.jacobian.size() != chain.n_steps + 1) {
        throw StateError("deform: mass-preserving action needs the Jacobians to time 0");
    }
    ScalarImage out = moved;
    const ScalarImage &jac = chain.jacobian[chain.n_steps];
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] *= jac.values[k];
    }
    return out;
}

std::string to_string(GroupAction action) {
    return action == GroupAction::Geometric ? "geometric" : "mass-preserving";
}

GroupAction parse_group_action(std::string_view name) {
    if (name == "geometric") {
        return GroupAction::Geometric;
    }
    if (name == "mass-preserving") {
        return GroupAction::MassPreserving;
    }
    throw ConfigError("unknown group action '" + std::string(name) + "' (expected geometric|mass-preserving)");
}

} // namespace ireg

#pragma once

#include <string>
#include <string_view>

#include "ireg/flow.hpp"

namespace ireg {

/// Deformed template at t = 1.
///   Geometric:      I o phi_{1,0}
///   MassPreserving: |D phi_{1,0}| (I o phi_{1,0})
/// Throws StateError when the forward sweep has not been run.
ScalarImage deform(GroupAction action, const FlowChain &chain);

std::string to_string(GroupAction action);
/// Accepts "geometric" and "mass-preserving".
GroupAction parse_group_action(std::string_view name);

} // namespace ireg

#pragma once

#include <string>

#include "linkstate/state_node.hpp"

namespace linkstate::cli {

// Indented human-readable tree. Dynamic entries print as `name:className`
// (an empty name shows as `<local>`, a by-name reference as `name:<ref>`).
std::string render_tree(const StateNode& node);

}  // namespace linkstate::cli

#include "render.hpp"

#include "linkstate/state_json.hpp"

namespace linkstate::cli {

namespace {

bool is_leaf(const StateNode& node) {
  switch (node.kind()) {
    case StateNode::Kind::kSequence: return node.as_sequence().empty();
    case StateNode::Kind::kMapping: return node.as_mapping().empty();
    case StateNode::Kind::kDynamicList: return node.as_dynamic_list().empty();
    default: return true;
  }
}

std::string leaf_text(const StateNode& node) {
  if (node.is_mapping()) return "{}";
  return encode(node);
}

void render(const StateNode& node, const std::string& indent, std::string& out) {
  switch (node.kind()) {
    case StateNode::Kind::kSequence: {
      std::size_t i = 0;
      for (const auto& item : node.as_sequence()) {
        out += indent + "[" + std::to_string(i++) + "]";
        if (is_leaf(item)) {
          out += " " + leaf_text(item) + "\n";
        } else {
          out += "\n";
          render(item, indent + "  ", out);
        }
      }
      break;
    }
    case StateNode::Kind::kMapping:
      for (const auto& [key, value] : node.as_mapping()) {
        out += indent + key + ":";
        if (is_leaf(value)) {
          out += " " + leaf_text(value) + "\n";
        } else {
          out += "\n";
          render(value, indent + "  ", out);
        }
      }
      break;
    case StateNode::Kind::kDynamicList:
      for (const auto& entry : node.as_dynamic_list()) {
        out += indent + (entry.object_name.empty() ? "<local>" : entry.object_name) + ":" +
               (entry.class_name.empty() ? "<ref>" : entry.class_name);
        if (is_leaf(entry.session_state)) {
          if (!entry.session_state.is_null()) out += " " + leaf_text(entry.session_state);
          out += "\n";
        } else {
          out += "\n";
          render(entry.session_state, indent + "  ", out);
        }
      }
      break;
    default: out += indent + leaf_text(node) + "\n"; break;
  }
}

}  // namespace

std::string render_tree(const StateNode& node) {
  std::string out;
  if (is_leaf(node)) return leaf_text(node) + "\n";
  render(node, "", out);
  return out;
}

}  // namespace linkstate::cli

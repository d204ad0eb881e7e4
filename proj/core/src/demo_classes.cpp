#include "linkstate/demo_classes.hpp"

namespace linkstate::demo {

Selection::Selection(Runtime& rt)
    : LinkableObject(rt),
      keys(make_child<LinkableVariable>("keys", StateNode::sequence({}), [](const StateNode& v) {
        if (v.is_null()) return true;
        if (v.is_dynamic_list_like() && !v.is_sequence()) return true;
        if (!v.is_sequence()) return false;
        for (const auto& item : v.as_sequence()) {
          if (!item.is_text()) return false;
        }
        return true;
      })) {}

void register_demo_classes(ClassRegistry& registry) {
  registry.register_class<Counter>("ex.Counter");
  registry.register_class<Label>("ex.Label");
  registry.register_class<Selection>("ex.Selection");
  registry.register_class<Style>("ex.Style");
  registry.register_class<Panel>("ex.Panel");
}

std::shared_ptr<const ClassRegistry> demo_registry() {
  static const auto registry = [] {
    auto r = std::make_shared<ClassRegistry>();
    register_demo_classes(*r);
    return r;
  }();
  return registry;
}

}  // namespace linkstate::demo

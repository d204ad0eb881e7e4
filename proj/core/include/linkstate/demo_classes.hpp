#pragma once

#include <memory>

#include "linkstate/class_registry.hpp"
#include "linkstate/linkable_dynamic_object.hpp"
#include "linkstate/linkable_hash_map.hpp"
#include "linkstate/linkable_object.hpp"

namespace linkstate::demo {

// Toy classes used by the tests, the CLI and the sync harness.

class Counter : public LinkableObject {
 public:
  explicit Counter(Runtime& rt) : LinkableObject(rt), count(make_child<LinkableNumber>("count", 0.0)) {}
  std::shared_ptr<LinkableNumber> count;
};

class Label : public LinkableObject {
 public:
  explicit Label(Runtime& rt)
      : LinkableObject(rt),
        text(make_child<LinkableString>("text", "")),
        size(make_child<LinkableNumber>("size", 12.0)) {}
  std::shared_ptr<LinkableString> text;
  std::shared_ptr<LinkableNumber> size;
};

// `keys` holds a sequence of strings.
class Selection : public LinkableObject {
 public:
  explicit Selection(Runtime& rt);
  std::shared_ptr<LinkableVariable> keys;
};

class Style : public LinkableObject {
 public:
  explicit Style(Runtime& rt)
      : LinkableObject(rt),
        color(make_child<LinkableString>("color", "black")),
        width(make_child<LinkableNumber>("width", 1.0)) {}
  std::shared_ptr<LinkableString> color;
  std::shared_ptr<LinkableNumber> width;
};

// Nested composite exercising every container kind at once.
class Panel : public LinkableObject {
 public:
  explicit Panel(Runtime& rt)
      : LinkableObject(rt),
        title(make_child<LinkableString>("title", "")),
        style(make_child<Style>("style")),
        layers(make_child<LinkableHashMap>("layers")),
        plotter(make_child<LinkableDynamicObject>("plotter")) {}
  std::shared_ptr<LinkableString> title;
  std::shared_ptr<Style> style;
  std::shared_ptr<LinkableHashMap> layers;
  std::shared_ptr<LinkableDynamicObject> plotter;
};

void register_demo_classes(ClassRegistry& registry);
std::shared_ptr<const ClassRegistry> demo_registry();

}  // namespace linkstate::demo

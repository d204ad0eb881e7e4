#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <typeindex>
#include <vector>

namespace linkstate {

class LinkableObject;
class Runtime;

// Maps dotted class names (`ex.Counter`) to factories so dynamic children
// can be instantiated from session state alone.
class ClassRegistry {
 public:
  using Factory = std::function<std::shared_ptr<LinkableObject>(Runtime&)>;

  // Throws DuplicateClass.
  void register_class(std::string class_name, Factory factory);

  template <class T>
  void register_class(std::string class_name) {
    register_class(class_name, [](Runtime& rt) { return std::make_shared<T>(rt); });
    by_type_.emplace(std::type_index(typeid(T)), std::move(class_name));
  }

  bool contains(std::string_view class_name) const;
  std::vector<std::string> class_names() const;

  // Throws UnknownClass.
  std::shared_ptr<LinkableObject> create(std::string_view class_name, Runtime& runtime) const;

  // Reverse lookup for objects registered through register_class<T>().
  std::optional<std::string> class_name_of(const LinkableObject& object) const;

 private:
  std::map<std::string, Factory, std::less<>> factories_;
  std::map<std::type_index, std::string> by_type_;
};

}  // namespace linkstate

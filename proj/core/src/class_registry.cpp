#include "linkstate/class_registry.hpp"

#include "linkstate/error.hpp"
#include "linkstate/linkable_object.hpp"

namespace linkstate {

void ClassRegistry::register_class(std::string class_name, Factory factory) {
  if (class_name.empty()) throw Error(Errc::kNameRequired, "class name required");
  if (factories_.contains(class_name)) {
    throw Error(Errc::kDuplicateClass, "class '" + class_name + "' already registered");
  }
  factories_.emplace(std::move(class_name), std::move(factory));
}

bool ClassRegistry::contains(std::string_view class_name) const {
  return factories_.find(class_name) != factories_.end();
}

std::vector<std::string> ClassRegistry::class_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : factories_) names.push_back(name);
  return names;
}

std::shared_ptr<LinkableObject> ClassRegistry::create(std::string_view class_name, Runtime& runtime) const {
  auto it = factories_.find(class_name);
  if (it == factories_.end()) {
    throw Error(Errc::kUnknownClass, "class '" + std::string(class_name) + "' is not registered");
  }
  return it->second(runtime);
}

std::optional<std::string> ClassRegistry::class_name_of(const LinkableObject& object) const {
  if (auto it = by_type_.find(std::type_index(typeid(object))); it != by_type_.end()) return it->second;
  return std::nullopt;
}

}  // namespace linkstate

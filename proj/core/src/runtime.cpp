#include "linkstate/runtime.hpp"

#include "linkstate/class_registry.hpp"

namespace linkstate {

Runtime::Runtime(std::shared_ptr<const ClassRegistry> registry)
    : registry_(registry ? std::move(registry) : std::make_shared<const ClassRegistry>()) {}

}  // namespace linkstate

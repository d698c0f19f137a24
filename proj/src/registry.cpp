#include "dagforge/registry.hpp"

#include "dagforge/errors.hpp"
#include "dagforge/expr.hpp"

namespace dagforge {

std::string Arity::describe() const {
  if (is_fixed()) return std::to_string(min);
  if (max == kUnbounded) return std::to_string(min) + "+";
  return std::to_string(min) + ".." + std::to_string(max);
}

FunctionRegistry::FunctionRegistry() { register_builtins(*this); }

void FunctionRegistry::register_function(FunctionEntry entry) {
  if (!is_identifier(entry.name))
    throw RegistryError("invalid function name '" + entry.name + "'");
  if (entry.arity.min > entry.arity.max)
    throw RegistryError("function '" + entry.name + "' has an empty arity range");
  if (!entry.impl) throw RegistryError("function '" + entry.name + "' has no implementation");
  if (auto it = entries_.find(entry.name); it != entries_.end()) {
    throw RegistryError(it->second.builtin
                            ? "'" + entry.name + "' is a built-in and cannot be redefined"
                            : "function '" + entry.name + "' is already registered");
  }
  auto name = entry.name;
  entries_.emplace(std::move(name), std::move(entry));
}

const FunctionEntry* FunctionRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<const FunctionEntry*> FunctionRegistry::entries() const {
  std::vector<const FunctionEntry*> out;
  out.reserve(entries_.size());
  for (const auto& [_, e] : entries_) out.push_back(&e);
  return out;
}

void register_host_function(FunctionRegistry& registry, std::string name, Arity arity,
                            bool stochastic, Callable impl, std::string summary) {
  FunctionEntry entry;
  entry.signature = name + "/" + arity.describe();
  entry.name = std::move(name);
  entry.arity = arity;
  entry.stochastic = stochastic;
  entry.builtin = false;
  entry.impl = std::move(impl);
  entry.summary = std::move(summary);
  registry.register_function(std::move(entry));
}

}  // namespace dagforge

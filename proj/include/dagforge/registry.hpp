#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dagforge/value.hpp"

namespace dagforge {

class RandomStream;

struct Arity {
  std::size_t min = 0;
  std::size_t max = 0;

  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  static Arity fixed(std::size_t n) { return {n, n}; }
  static Arity variadic(std::size_t min, std::size_t max = kUnbounded) { return {min, max}; }

  bool is_fixed() const noexcept { return min == max; }
  bool accepts(std::size_t n) const noexcept { return n >= min && n <= max; }

  /// "2", "1..3", "1+"
  std::string describe() const;
};

/// `rng` is non-null whenever the function is registered as stochastic and is
/// called during sampling.
using Callable = std::function<Value(std::span<const Value> args, RandomStream* rng)>;

struct FunctionEntry {
  std::string name;
  Arity arity;
  bool stochastic = false;
  bool builtin = false;
  Callable impl;
  std::string signature;  // DSL-level, e.g. "uniform(a: float, b: float) -> float"
  std::string summary;
};

/// Name -> callable table consulted by validation and evaluation. Constructed
/// with every built-in; hosts may add functions but never shadow one.
/// Registration must finish before the registry is shared across threads.
class FunctionRegistry {
 public:
  FunctionRegistry();

  /// Throws RegistryError on an invalid identifier or a name that is already
  /// taken.
  void register_function(FunctionEntry entry);

  const FunctionEntry* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  /// Sorted by name.
  std::vector<const FunctionEntry*> entries() const;

 private:
  std::map<std::string, FunctionEntry, std::less<>> entries_;
};

/// Adds a host-provided function.
void register_host_function(FunctionRegistry& registry, std::string name, Arity arity,
                            bool stochastic, Callable impl, std::string summary = {});

/// Called by the FunctionRegistry constructor.
void register_builtins(FunctionRegistry& registry);

}  // namespace dagforge

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dagforge {

/// child -> parents (parents listed in first-mention order).
using ParentMap = std::map<std::string, std::vector<std::string>>;

/// None if the graph is acyclic, else one cycle written in parent direction
/// (each name's successor is one of its parents) and rotated to start at its
/// lexicographically smallest member.
std::optional<std::vector<std::string>> detect_cycle(const ParentMap& edges);

/// Kahn's algorithm; among ready nodes the earliest in `nodes` goes first.
/// Throws CycleError when the graph has a cycle.
std::vector<std::string> topo_sort(std::span<const std::string> nodes, const ParentMap& edges);

}  // namespace dagforge

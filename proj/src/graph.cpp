#include "dagforge/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "dagforge/errors.hpp"

namespace dagforge {

std::optional<std::vector<std::string>> detect_cycle(const ParentMap& edges) {
  // Every endpoint, sorted, so the search (and hence the witness) is stable.
  std::map<std::string, std::vector<std::string>> graph;
  for (const auto& [child, parents] : edges) {
    graph[child];
    for (const auto& p : parents) graph[p];
  }
  for (const auto& [child, parents] : edges) graph[child] = parents;

  enum class Color { White, Gray, Black };
  std::unordered_map<std::string, Color> color;
  for (const auto& [name, _] : graph) color[name] = Color::White;

  struct Frame {
    const std::string* name;
    std::size_t next_parent;
  };

  for (const auto& [root, _] : graph) {
    if (color[root] != Color::White) continue;
    std::vector<Frame> stack{{&root, 0}};
    color[root] = Color::Gray;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& parents = graph[*top.name];
      if (top.next_parent == parents.size()) {
        color[*top.name] = Color::Black;
        stack.pop_back();
        continue;
      }
      const std::string& parent = parents[top.next_parent++];
      const Color c = color[parent];
      if (c == Color::White) {
        color[parent] = Color::Gray;
        stack.push_back({&graph.find(parent)->first, 0});
      } else if (c == Color::Gray) {
        std::vector<std::string> cycle;
        auto it = std::find_if(stack.begin(), stack.end(),
                               [&](const Frame& f) { return *f.name == parent; });
        for (; it != stack.end(); ++it) cycle.push_back(*it->name);
        std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
        return cycle;
      }
    }
  }
  return std::nullopt;
}

std::vector<std::string> topo_sort(std::span<const std::string> nodes, const ParentMap& edges) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);

  std::vector<std::size_t> pending(nodes.size(), 0);
  std::vector<std::vector<std::size_t>> children(nodes.size());
  for (const auto& [child, parents] : edges) {
    auto c = index.find(child);
    if (c == index.end()) throw std::invalid_argument("edge target '" + child + "' is not a node");
    std::vector<std::size_t> seen;
    for (const auto& p : parents) {
      auto it = index.find(p);
      if (it == index.end()) throw std::invalid_argument("edge source '" + p + "' is not a node");
      if (std::find(seen.begin(), seen.end(), it->second) != seen.end()) continue;
      seen.push_back(it->second);
      children[it->second].push_back(c->second);
      ++pending[c->second];
    }
  }

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (pending[i] == 0) ready.push(i);

  std::vector<std::string> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(nodes[i]);
    for (std::size_t c : children[i])
      if (--pending[c] == 0) ready.push(c);
  }
  if (order.size() != nodes.size()) throw CycleError("graph has a cycle; no topological order");
  return order;
}

}  // namespace dagforge

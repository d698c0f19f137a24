#pragma once

#include <map>
#include <regex>
#include <set>
#include <string>
#include <utility>

#include "dagforge/example_functions.hpp"
#include "dagforge/model.hpp"
#include "oracles.hpp"

namespace fixture {

inline std::string model_path(const std::string& file) {
  return std::string(DAGFORGE_MODELS_DIR) + "/" + file;
}

inline std::string model_text(const std::string& file) { return oracle::slurp(model_path(file)); }

inline const dagforge::FunctionRegistry& example_registry() {
  static const dagforge::FunctionRegistry registry = [] {
    dagforge::FunctionRegistry r;
    dagforge::register_example_functions(r);
    return r;
  }();
  return registry;
}

inline dagforge::CompiledModel compile(const std::string& yaml) {
  return dagforge::validate(dagforge::parse_model(yaml), example_registry());
}

inline dagforge::CompiledModel bundled(const std::string& file) { return compile(model_text(file)); }

/// Minimal document around a `nodes:` body (already indented by four spaces).
inline std::string doc(const std::string& nodes, const std::string& extra = "",
                       const std::string& num_samples = "10") {
  return "graph:\n  nodes:\n" + nodes + "instructions:\n  simulation:\n    csv_name: out\n" +
         "    num_samples: " + num_samples + "\n" + extra;
}

/// Edge set read back from DOT text: every `A -> B` statement.
inline std::set<std::pair<std::string, std::string>> dot_edges(const std::string& dot) {
  std::set<std::pair<std::string, std::string>> out;
  static const std::regex edge(R"re(^\s*"?([A-Za-z_][A-Za-z0-9_]*)"?\s*->\s*"?([A-Za-z_][A-Za-z0-9_]*)"?)re");
  std::istringstream in(dot);
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (std::regex_search(line, m, edge)) out.emplace(m[1], m[2]);
  }
  return out;
}

using EdgeSet = std::set<std::pair<std::string, std::string>>;

inline const EdgeSet& images_edges() {
  static const EdgeSet edges = {{"U1", "H"}, {"U1", "V"}, {"U2", "C"},    {"H", "R"},
                                {"C", "R"},  {"V", "Y"},  {"C", "Y"},     {"H", "Image"},
                                {"V", "Image"}, {"R", "Image"}, {"C", "Image"}};
  return edges;
}

}  // namespace fixture

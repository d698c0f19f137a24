#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dagforge/expr.hpp"
#include "dagforge/graph.hpp"
#include "dagforge/registry.hpp"

namespace dagforge {

enum class NodeKind { Standard, Selection, Missing, Stratify };

std::string_view node_kind_name(NodeKind kind) noexcept;

struct NodeDecl {
  std::string name;
  NodeKind kind = NodeKind::Standard;
  ExprPtr expr;
  std::string source;  // expression text as written
  bool observed = true;
  std::optional<std::int64_t> size;      // plate width, standard nodes only
  std::optional<std::string> underlying;  // missing nodes only
};

struct SimInstructions {
  std::string csv_name;
  std::uint64_t num_samples = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

struct ModelSpec {
  std::vector<NodeDecl> nodes;  // declaration order
  SimInstructions instructions;
  std::vector<std::string> warnings;
};

/// Validated model: every reference resolves, every call matches the registry,
/// the graph is acyclic. Immutable once built.
struct CompiledModel {
  std::vector<NodeDecl> nodes;
  ParentMap parents;
  std::vector<std::string> topo_order;
  std::optional<std::string> selection;
  std::optional<std::string> stratify;
  std::map<std::string, std::string> missing_map;  // underlying -> missing node

  const NodeDecl& node(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Observed nodes in topological order, selection node excluded.
  std::vector<std::string> output_columns() const;

  std::size_t edge_count() const;
};

/// Parses a YAML model document. Throws YamlSyntaxError for malformed YAML and
/// SpecError for schema problems.
ModelSpec parse_model(std::string_view yaml_text);

/// Throws ValidationError listing every violation found.
CompiledModel validate(const ModelSpec& spec, const FunctionRegistry& registry);

/// Parent list of a node: its expression's free references, then (for
/// missing nodes) the underlying variable if not already mentioned.
std::vector<std::string> node_parents(const NodeDecl& node);

/// Graphviz digraph of the model.
std::string to_dot(const CompiledModel& model);

/// Stable digest of the compiled model (names, kinds, flags, printed
/// expressions), hex-encoded FNV-1a 64.
std::string model_hash(const CompiledModel& model);

}  // namespace dagforge

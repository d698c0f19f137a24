#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dagforge/model.hpp"

namespace dagforge {

/// Target node and replacement expression, applied in order.
using Interventions = std::vector<std::pair<std::string, ExprPtr>>;

struct RunConfig {
  std::uint64_t num_samples = 1;
  std::uint64_t seed = 0;
  Interventions interventions;
  std::uint64_t max_rejection_factor = 1000;
  unsigned threads = 1;
};

struct SampleRow {
  std::vector<Value> values;  // indexed like CompiledModel::nodes
  std::optional<std::string> stratum;
};

struct Dataset {
  std::vector<std::string> node_names;    // declaration order
  std::vector<std::string> column_order;  // observed nodes, topological order
  std::vector<SampleRow> rows;
  std::uint64_t attempts = 0;

  const Value& at(std::size_t row, std::string_view node) const;

  /// Positions of column_order entries within node_names.
  std::vector<std::size_t> column_indices() const;
};

struct SampleResult {
  SampleRow row;
  bool selected = true;
};

/// Substream key of a node's random stream within a sample.
std::uint64_t node_stream_key(std::string_view node_name) noexcept;

/// Replaces each target's expression and revalidates the graph. Targets must
/// be standard nodes. Throws ValidationError.
CompiledModel apply_interventions(const CompiledModel& model, const Interventions& interventions,
                                  const FunctionRegistry& registry);

/// Forward-samples one row. Throws EvalError (with the node name attached) or
/// CoercionError.
SampleResult sample_one(const CompiledModel& model, std::uint64_t sample_index, std::uint64_t seed,
                        const FunctionRegistry& registry);

/// Applies config.interventions, then samples consecutive indices until
/// num_samples rows pass selection. Rejected indices are consumed. Throws
/// SelectionStarvation once attempts reach num_samples * max_rejection_factor.
/// The result does not depend on config.threads.
Dataset simulate(const CompiledModel& model, const RunConfig& config,
                 const FunctionRegistry& registry);

/// Resolves missing nodes in a row whose missing-node slots still hold their
/// indicator values: each becomes Missing when the indicator is true and a
/// copy of the underlying value otherwise. Throws CoercionError when an
/// indicator is not a bool or an int 0/1.
void apply_missing(SampleRow& row, const CompiledModel& model);

/// Single-node form used during forward sampling.
Value resolve_missing(const Value& indicator, const Value& underlying, std::string_view node);

}  // namespace dagforge

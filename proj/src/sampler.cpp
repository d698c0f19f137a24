#include "dagforge/sampler.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>
#include <unordered_map>

#include "dagforge/random.hpp"

namespace dagforge {

const Value& Dataset::at(std::size_t row, std::string_view node) const {
  for (std::size_t i = 0; i < node_names.size(); ++i)
    if (node_names[i] == node) return rows.at(row).values.at(i);
  throw std::out_of_range("no node named '" + std::string(node) + "'");
}

std::vector<std::size_t> Dataset::column_indices() const {
  std::vector<std::size_t> out;
  for (const auto& c : column_order) {
    auto it = std::find(node_names.begin(), node_names.end(), c);
    out.push_back(static_cast<std::size_t>(it - node_names.begin()));
  }
  return out;
}

std::uint64_t node_stream_key(std::string_view node_name) noexcept { return fnv1a64(node_name); }

CompiledModel apply_interventions(const CompiledModel& model, const Interventions& interventions,
                                  const FunctionRegistry& registry) {
  if (interventions.empty()) return model;
  ModelSpec spec;
  spec.nodes = model.nodes;
  std::vector<std::string> violations;
  for (const auto& [target, expr] : interventions) {
    auto idx = model.index_of(target);
    if (!idx) {
      violations.push_back("intervention target '" + target + "' is not a node");
      continue;
    }
    auto& node = spec.nodes[*idx];
    if (node.kind != NodeKind::Standard) {
      violations.push_back("intervention target '" + target + "' is a " +
                           std::string(node_kind_name(node.kind)) + " node, not a standard node");
      continue;
    }
    if (!expr) {
      violations.push_back("intervention on '" + target + "' has no expression");
      continue;
    }
    node.expr = expr;
    try {
      node.source = pretty_print(*expr);
    } catch (const std::exception&) {
      node.source = "<host value>";
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return validate(spec, registry);
}

Value resolve_missing(const Value& indicator, const Value& underlying, std::string_view node) {
  bool drop = false;
  try {
    drop = coerce_bool(indicator, "missingness indicator");
  } catch (const CoercionError& e) {
    throw CoercionError(e.what(), std::string(node));
  }
  return drop ? Value::missing() : underlying;
}

void apply_missing(SampleRow& row, const CompiledModel& model) {
  for (const auto& [underlying, missing] : model.missing_map) {
    const auto m = *model.index_of(missing);
    const auto u = *model.index_of(underlying);
    row.values.at(m) = resolve_missing(row.values.at(m), row.values.at(u), missing);
  }
}

namespace {

std::string stratum_label(const Value& v, const std::string& node) {
  switch (v.kind()) {
    case Value::Kind::Str: return v.as_str();
    case Value::Kind::Int:
    case Value::Kind::Float:
    case Value::Kind::Bool: return csv_cell(v);
    default:
      throw CoercionError("stratum label must be a scalar, got " + std::string(type_name(v)), node);
  }
}

/// Per-node evaluation steps in topological order, resolved once per run.
struct Plan {
  struct Step {
    const NodeDecl* node;
    std::size_t index;
    std::size_t underlying;  // valid for missing nodes
    std::uint64_t stream_key;
  };

  explicit Plan(const CompiledModel& model) {
    for (const auto& name : model.topo_order) {
      const auto idx = *model.index_of(name);
      const auto& decl = model.nodes[idx];
      Step s{&decl, idx, 0, node_stream_key(decl.name)};
      if (decl.kind == NodeKind::Missing) s.underlying = *model.index_of(*decl.underlying);
      steps.push_back(s);
    }
    node_count = model.nodes.size();
  }

  SampleResult run(std::uint64_t sample_index, std::uint64_t seed,
                   const FunctionRegistry& registry) const {
    SampleResult out;
    out.row.values.assign(node_count, Value::missing());
    EvalEnv env;
    env.registry = &registry;
    env.bindings.reserve(node_count);
    for (const auto& step : steps) {
      const NodeDecl& decl = *step.node;
      RandomStream rng(seed, sample_index, step.stream_key);
      env.rng = &rng;
      Value v;
      try {
        if (decl.size) {
          List items;
          items.reserve(static_cast<std::size_t>(*decl.size));
          for (std::int64_t i = 0; i < *decl.size; ++i) items.push_back(eval(*decl.expr, env));
          v = Value::list(std::move(items));
        } else {
          v = eval(*decl.expr, env);
        }
      } catch (const EvalError& e) {
        throw e.with_node(decl.name);
      }
      switch (decl.kind) {
        case NodeKind::Missing:
          v = resolve_missing(v, out.row.values[step.underlying], decl.name);
          break;
        case NodeKind::Selection:
          try {
            out.selected = coerce_bool(v, "selection predicate");
          } catch (const CoercionError& e) {
            throw CoercionError(e.what(), decl.name);
          }
          break;
        case NodeKind::Stratify:
          out.row.stratum = stratum_label(v, decl.name);
          break;
        case NodeKind::Standard:
          break;
      }
      out.row.values[step.index] = v;
      env.bindings.insert_or_assign(decl.name, std::move(v));
    }
    return out;
  }

  std::vector<Step> steps;
  std::size_t node_count = 0;
};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

struct Slot {
  std::optional<SampleResult> result;
  std::exception_ptr error;
};

void fill_batch(const Plan& plan, std::uint64_t first_index, std::vector<Slot>& slots,
                std::uint64_t seed, const FunctionRegistry& registry, unsigned threads) {
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        slots[i].result = plan.run(first_index + i, seed, registry);
      } catch (...) {
        slots[i].error = std::current_exception();
      }
    }
  };
  const std::size_t n = slots.size();
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    work(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SampleResult sample_one(const CompiledModel& model, std::uint64_t sample_index, std::uint64_t seed,
                        const FunctionRegistry& registry) {
  return Plan(model).run(sample_index, seed, registry);
}

Dataset simulate(const CompiledModel& model, const RunConfig& config,
                 const FunctionRegistry& registry) {
  const CompiledModel effective = apply_interventions(model, config.interventions, registry);
  const Plan plan(effective);

  Dataset ds;
  for (const auto& n : effective.nodes) ds.node_names.push_back(n.name);
  ds.column_order = effective.output_columns();
  ds.rows.reserve(config.num_samples);

  const std::uint64_t limit = saturating_mul(config.num_samples, config.max_rejection_factor);
  const unsigned threads = std::max(1u, config.threads);
  std::uint64_t next_index = 0;
  std::vector<Slot> slots;

  while (ds.rows.size() < config.num_samples) {
    if (next_index >= limit) throw SelectionStarvation(next_index, ds.rows.size(), config.num_samples);
    const std::uint64_t needed = config.num_samples - ds.rows.size();
    // Single-threaded runs never evaluate past what the scan will consume;
    // parallel runs over-fetch and discard the tail.
    std::uint64_t batch = threads == 1 ? needed : std::max<std::uint64_t>(needed, 64ULL * threads);
    batch = std::min({batch, limit - next_index, std::uint64_t{1} << 16});
    slots.assign(static_cast<std::size_t>(batch), Slot{});
    fill_batch(plan, next_index, slots, config.seed, registry, threads);
    for (auto& slot : slots) {
      ++next_index;
      if (slot.error) std::rethrow_exception(slot.error);
      if (slot.result->selected) ds.rows.push_back(std::move(slot.result->row));
      if (ds.rows.size() == config.num_samples) break;
    }
  }
  ds.attempts = next_index;
  return ds;
}

}  // namespace dagforge

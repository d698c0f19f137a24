#include "dagforge/model.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dagforge/random.hpp"

namespace dagforge {

std::string_view node_kind_name(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::Standard: return "standard";
    case NodeKind::Selection: return "selection";
    case NodeKind::Missing: return "missing";
    case NodeKind::Stratify: return "stratify";
  }
  return "standard";
}

const NodeDecl& CompiledModel::node(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw std::out_of_range("no node named '" + std::string(name) + "'");
  return nodes[*i];
}

std::optional<std::size_t> CompiledModel::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::string> CompiledModel::output_columns() const {
  std::vector<std::string> out;
  for (const auto& name : topo_order) {
    const auto& n = node(name);
    if (n.kind != NodeKind::Selection && n.observed) out.push_back(name);
  }
  return out;
}

std::size_t CompiledModel::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, ps] : parents) n += ps.size();
  return n;
}

// ---------------------------------------------------------------------------
// YAML -> ModelSpec

namespace {

std::string child_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string key_text(const YAML::Node& key, const std::string& path) {
  if (!key.IsScalar()) throw SpecError(path, "map keys must be plain names");
  return key.Scalar();
}

const std::string& scalar(const YAML::Node& n, const std::string& path, std::string_view what) {
  if (!n.IsScalar()) throw SpecError(path, std::string(what) + " must be a scalar");
  return n.Scalar();
}

bool parse_bool(const YAML::Node& n, const std::string& path) {
  const auto text = lower(scalar(n, path, "value"));
  if (text == "true") return true;
  if (text == "false") return false;
  throw SpecError(path, "expected true or false, got '" + n.Scalar() + "'");
}

std::uint64_t parse_u64(const YAML::Node& n, const std::string& path) {
  const auto& text = scalar(n, path, "value");
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw SpecError(path, "expected a non-negative integer, got '" + text + "'");
  return v;
}

/// Checks `n` is a map and returns its entries in document order, rejecting
/// repeated keys.
std::vector<std::pair<std::string, YAML::Node>> map_entries(const YAML::Node& n,
                                                            const std::string& path) {
  if (!n.IsMap()) throw SpecError(path, "expected a mapping");
  std::vector<std::pair<std::string, YAML::Node>> out;
  std::set<std::string> seen;
  for (const auto& kv : n) {
    auto key = key_text(kv.first, path);
    if (!seen.insert(key).second) throw SpecError(child_path(path, key), "duplicate key");
    out.emplace_back(std::move(key), kv.second);
  }
  return out;
}

ExprPtr parse_node_expr(const std::string& text, const std::string& path) {
  try {
    return parse(text);
  } catch (const LexError& e) {
    throw SpecError(path, std::string("invalid expression '") + text + "': " + e.what());
  } catch (const ParseError& e) {
    throw SpecError(path, std::string("invalid expression '") + text + "': " + e.what());
  }
}

NodeKind parse_kind(const YAML::Node& n, const std::string& path) {
  const auto text = lower(scalar(n, path, "kind"));
  if (text == "standard") return NodeKind::Standard;
  if (text == "selection") return NodeKind::Selection;
  if (text == "missing") return NodeKind::Missing;
  if (text == "stratify") return NodeKind::Stratify;
  throw SpecError(path, "unknown node kind '" + n.Scalar() +
                            "' (expected standard, selection, missing or stratify)");
}

NodeDecl parse_node(const std::string& name, const YAML::Node& body, const std::string& path) {
  NodeDecl node;
  node.name = name;
  if (body.IsScalar()) {
    node.source = body.Scalar();
    node.expr = parse_node_expr(node.source, path);
    return node;
  }
  if (!body.IsMap()) throw SpecError(path, "node must be an expression or a mapping");

  std::optional<bool> observed;
  bool has_function = false;
  for (const auto& [key, value] : map_entries(body, path)) {
    const auto p = child_path(path, key);
    if (key == "function") {
      node.source = scalar(value, p, "function");
      node.expr = parse_node_expr(node.source, p);
      has_function = true;
    } else if (key == "observed") {
      observed = parse_bool(value, p);
    } else if (key == "kind") {
      node.kind = parse_kind(value, p);
    } else if (key == "size") {
      const auto size = parse_u64(value, p);
      if (size < 1 || size > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw SpecError(p, "plate size must be a positive integer");
      node.size = static_cast<std::int64_t>(size);
    } else if (key == "underlying") {
      const auto& target = scalar(value, p, "underlying");
      if (!is_identifier(target)) throw SpecError(p, "'" + target + "' is not a valid node name");
      node.underlying = target;
    } else {
      throw SpecError(p, "unknown key (expected function, observed, kind, size or underlying)");
    }
  }
  if (!has_function) throw SpecError(path, "missing 'function' entry");
  if (node.size && node.kind != NodeKind::Standard)
    throw SpecError(child_path(path, "size"), "plates are only allowed on standard nodes");
  if (node.kind == NodeKind::Missing && !node.underlying)
    throw SpecError(path, "missing node needs an 'underlying' variable");
  if (node.kind != NodeKind::Missing && node.underlying)
    throw SpecError(child_path(path, "underlying"), "only missing nodes take 'underlying'");
  if (node.kind == NodeKind::Selection) {
    if (observed.value_or(false))
      throw SpecError(child_path(path, "observed"), "selection nodes are never observed");
    node.observed = false;
  } else {
    node.observed = observed.value_or(true);
  }
  return node;
}

void parse_nodes(const YAML::Node& nodes, const std::string& path, ModelSpec& spec) {
  std::set<std::string> seen;
  if (!nodes.IsMap()) throw SpecError(path, "expected a mapping of node names to expressions");
  for (const auto& kv : nodes) {
    const auto name = key_text(kv.first, path);
    const auto p = child_path(path, name);
    if (name == "python_file") {
      spec.warnings.push_back(p + ": script files are not loaded; ignoring");
      continue;
    }
    if (!is_identifier(name)) throw SpecError(p, "'" + name + "' is not a valid node name");
    if (!seen.insert(name).second) throw SpecError(p, "duplicate node name");
    spec.nodes.push_back(parse_node(name, kv.second, p));
  }
  if (spec.nodes.empty()) throw SpecError(path, "model has no nodes");
}

void parse_graph(const YAML::Node& graph, ModelSpec& spec) {
  bool has_nodes = false;
  for (const auto& [key, value] : map_entries(graph, "graph")) {
    const auto p = child_path("graph", key);
    if (key == "nodes") {
      parse_nodes(value, p, spec);
      has_nodes = true;
    } else if (key == "python_file") {
      spec.warnings.push_back(p + ": script files are not loaded; ignoring");
    } else {
      throw SpecError(p, "unknown key (expected nodes)");
    }
  }
  if (!has_nodes) throw SpecError("graph", "missing 'nodes' block");
}

void parse_simulation(const YAML::Node& sim, const std::string& path, SimInstructions& out) {
  bool has_name = false;
  bool has_count = false;
  for (const auto& [key, value] : map_entries(sim, path)) {
    const auto p = child_path(path, key);
    if (key == "csv_name") {
      out.csv_name = scalar(value, p, "csv_name");
      if (out.csv_name.empty() || out.csv_name.find_first_of("/\\") != std::string::npos)
        throw SpecError(p, "csv_name must be a non-empty file stem without path separators");
      has_name = true;
    } else if (key == "num_samples") {
      out.num_samples = parse_u64(value, p);
      if (out.num_samples < 1) throw SpecError(p, "num_samples must be at least 1");
      has_count = true;
    } else if (key == "seed") {
      out.seed = parse_u64(value, p);
    } else if (key == "output_dir") {
      out.output_dir = std::filesystem::path(scalar(value, p, "output_dir"));
    } else {
      throw SpecError(p, "unknown key (expected csv_name, num_samples, seed or output_dir)");
    }
  }
  if (!has_name) throw SpecError(path, "missing 'csv_name'");
  if (!has_count) throw SpecError(path, "missing 'num_samples'");
}

void parse_instructions(const YAML::Node& instr, SimInstructions& out) {
  bool has_sim = false;
  for (const auto& [key, value] : map_entries(instr, "instructions")) {
    const auto p = child_path("instructions", key);
    if (key == "simulation") {
      parse_simulation(value, p, out);
      has_sim = true;
    } else {
      throw SpecError(p, "unknown key (expected simulation)");
    }
  }
  if (!has_sim) throw SpecError("instructions", "missing 'simulation' block");
}

}  // namespace

ModelSpec parse_model(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw YamlSyntaxError("", e.what());
  }
  try {
    if (!root.IsMap())
      throw SpecError("", "document must be a mapping with 'graph' and 'instructions'");
    ModelSpec spec;
    bool has_graph = false;
    bool has_instructions = false;
    for (const auto& [key, value] : map_entries(root, "")) {
      if (key == "graph") {
        parse_graph(value, spec);
        has_graph = true;
      } else if (key == "instructions") {
        parse_instructions(value, spec.instructions);
        has_instructions = true;
      } else {
        throw SpecError(key, "unknown key (expected graph or instructions)");
      }
    }
    if (!has_graph) throw SpecError("", "missing 'graph' block");
    if (!has_instructions) throw SpecError("", "missing 'instructions' block");
    return spec;
  } catch (const SpecError&) {
    throw;
  } catch (const YAML::Exception& e) {
    throw SpecError("", e.what());
  }
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> node_parents(const NodeDecl& node) {
  auto parents = free_refs(*node.expr);
  if (node.kind == NodeKind::Missing && node.underlying &&
      std::find(parents.begin(), parents.end(), *node.underlying) == parents.end())
    parents.push_back(*node.underlying);
  return parents;
}

CompiledModel validate(const ModelSpec& spec, const FunctionRegistry& registry) {
  std::vector<std::string> violations;
  std::unordered_map<std::string, const NodeDecl*> by_name;
  for (const auto& n : spec.nodes) {
    if (!by_name.emplace(n.name, &n).second)
      violations.push_back("duplicate node name '" + n.name + "'");
  }

  CompiledModel model;
  model.nodes = spec.nodes;
  std::map<std::string, std::string> underlying_owner;

  for (const auto& n : spec.nodes) {
    const std::string where = "node '" + n.name + "'";
    if (!n.expr) {
      violations.push_back(where + ": no expression");
      model.parents[n.name] = {};
      continue;
    }
    std::vector<std::string> resolved;
    for (const auto& p : node_parents(n)) {
      if (by_name.count(p)) {
        resolved.push_back(p);
      } else if (!(n.underlying && p == *n.underlying)) {
        violations.push_back(where + ": unresolved reference '" + p + "'");
      }
    }
    model.parents[n.name] = std::move(resolved);

    for (const auto& call : call_sites(*n.expr)) {
      const FunctionEntry* fn = registry.find(call.callee);
      if (!fn) {
        violations.push_back(where + ": unknown function '" + call.callee + "'");
      } else if (!fn->arity.accepts(call.arity)) {
        violations.push_back(where + ": '" + call.callee + "' takes " + fn->arity.describe() +
                             " argument(s), got " + std::to_string(call.arity));
      }
    }

    switch (n.kind) {
      case NodeKind::Selection:
        if (model.selection)
          violations.push_back(where + ": only one selection node is allowed (already have '" +
                               *model.selection + "')");
        else
          model.selection = n.name;
        break;
      case NodeKind::Stratify:
        if (model.stratify)
          violations.push_back(where + ": only one stratify node is allowed (already have '" +
                               *model.stratify + "')");
        else
          model.stratify = n.name;
        break;
      case NodeKind::Missing: {
        if (!n.underlying) {
          violations.push_back(where + ": missing node has no underlying variable");
          break;
        }
        auto target = by_name.find(*n.underlying);
        if (target == by_name.end()) {
          violations.push_back(where + ": underlying variable '" + *n.underlying + "' does not exist");
        } else if (target->second->kind != NodeKind::Standard) {
          violations.push_back(where + ": underlying variable '" + *n.underlying +
                               "' must be a standard node");
        } else if (auto [it, fresh] = underlying_owner.emplace(*n.underlying, n.name); !fresh) {
          violations.push_back(where + ": '" + *n.underlying + "' already has missing node '" +
                               it->second + "'");
        } else {
          model.missing_map[*n.underlying] = n.name;
        }
        break;
      }
      case NodeKind::Standard:
        if (n.size && *n.size < 1) violations.push_back(where + ": plate size must be positive");
        break;
    }
  }

  if (auto cycle = detect_cycle(model.parents)) {
    std::string text;
    for (const auto& name : *cycle) text += (text.empty() ? "" : ", ") + name;
    violations.push_back("dependency cycle [" + text + "]");
  }

  if (!violations.empty()) throw ValidationError(std::move(violations));

  std::vector<std::string> names;
  for (const auto& n : model.nodes) names.push_back(n.name);
  model.topo_order = topo_sort(names, model.parents);
  return model;
}

// ---------------------------------------------------------------------------
// DOT and hashing

namespace {

std::string dot_id(const std::string& name) {
  static const std::set<std::string> keywords = {"node", "edge", "graph", "digraph", "subgraph",
                                                 "strict"};
  return keywords.count(lower(name)) ? "\"" + name + "\"" : name;
}

}  // namespace

std::string to_dot(const CompiledModel& model) {
  std::ostringstream os;
  os << "digraph model {\n";
  for (const auto& n : model.nodes) {
    std::vector<std::string> attrs;
    std::string label = n.name;
    if (n.size) label += " [" + std::to_string(*n.size) + "]";
    switch (n.kind) {
      case NodeKind::Selection:
        attrs.push_back("shape=diamond");
        label += "\\n(selection)";
        break;
      case NodeKind::Missing:
        attrs.push_back("shape=box");
        label += "\\n(missing: " + n.underlying.value_or("?") + ")";
        break;
      case NodeKind::Stratify:
        attrs.push_back("shape=hexagon");
        label += "\\n(stratify)";
        break;
      case NodeKind::Standard:
        break;
    }
    if (!n.observed) attrs.push_back("style=dashed");
    if (label != n.name) attrs.push_back("label=\"" + label + "\"");
    os << "  " << dot_id(n.name);
    if (!attrs.empty()) {
      os << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? ", " : "") << attrs[i];
      os << "]";
    }
    os << ";\n";
  }
  for (const auto& n : model.nodes) {
    for (const auto& p : model.parents.at(n.name)) {
      os << "  " << dot_id(p) << " -> " << dot_id(n.name);
      if (n.kind == NodeKind::Missing && n.underlying && p == *n.underlying) os << " [style=dotted]";
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string model_hash(const CompiledModel& model) {
  std::string canonical;
  for (const auto& n : model.nodes) {
    std::string expr_text;
    try {
      expr_text = pretty_print(*n.expr);
    } catch (const std::exception&) {
      expr_text = n.source;
    }
    canonical += n.name + '\x1f' + std::string(node_kind_name(n.kind)) + '\x1f' +
                 (n.observed ? "1" : "0") + '\x1f' + (n.size ? std::to_string(*n.size) : "") +
                 '\x1f' + n.underlying.value_or("") + '\x1f' + expr_text + '\x1e';
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
  return buf;
}

}  // namespace dagforge

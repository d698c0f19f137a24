#include "dagforge/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dagforge/example_functions.hpp"
#include "dagforge/model.hpp"
#include "dagforge/output.hpp"
#include "dagforge/sampler.hpp"

namespace dagforge::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> num_samples;
  std::optional<std::string> out_dir;
  std::vector<std::string> interventions;
  std::uint64_t max_rejection_factor = 1000;
  unsigned threads = 1;
  std::string format = "dot";
  bool no_example_functions = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

FunctionRegistry make_registry(const Options& opts) {
  FunctionRegistry registry;
  if (!opts.no_example_functions) register_example_functions(registry);
  return registry;
}

struct Loaded {
  ModelSpec spec;
  CompiledModel model;
};

Loaded load(const Options& opts, const FunctionRegistry& registry, std::ostream& err) {
  const std::string text = read_file(opts.spec_path);
  ModelSpec spec = parse_model(text);
  for (const auto& w : spec.warnings) err << "warning: " << w << "\n";
  CompiledModel model = validate(spec, registry);
  return {std::move(spec), std::move(model)};
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("DAGFORGE_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string_view text(raw);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw IoError("DAGFORGE_SEED must be an unsigned integer, got '" + std::string(text) + "'");
  return v;
}

Interventions parse_interventions(const std::vector<std::string>& raw) {
  Interventions out;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError({"--intervene expects NODE=EXPR, got '" + item + "'"});
    std::string target = item.substr(0, eq);
    while (!target.empty() && target.back() == ' ') target.pop_back();
    while (!target.empty() && target.front() == ' ') target.erase(target.begin());
    try {
      out.emplace_back(target, parse(item.substr(eq + 1)));
    } catch (const Error& e) {
      throw ValidationError({"--intervene " + target + ": " + e.what()});
    }
  }
  return out;
}

int cmd_validate(const Options& opts, std::ostream& out, std::ostream& err) {
  const auto registry = make_registry(opts);
  const auto loaded = load(opts, registry, err);
  const auto& m = loaded.model;
  out << m.nodes.size() << " nodes, " << m.edge_count() << " edges\n";
  out << "topological order:";
  for (const auto& n : m.topo_order) out << " " << n;
  out << "\n";
  return kOk;
}

int cmd_graph(const Options& opts, std::ostream& out, std::ostream& err) {
  const auto registry = make_registry(opts);
  const auto loaded = load(opts, registry, err);
  out << to_dot(loaded.model);
  return kOk;
}

int cmd_run(const Options& opts, std::ostream&, std::ostream& err) {
  const auto registry = make_registry(opts);
  const auto loaded = load(opts, registry, err);
  const auto& instructions = loaded.spec.instructions;

  RunConfig config;
  config.num_samples = opts.num_samples.value_or(instructions.num_samples);
  if (config.num_samples < 1) throw ValidationError({"--num-samples must be at least 1"});
  if (opts.seed) {
    config.seed = *opts.seed;
  } else if (instructions.seed) {
    config.seed = *instructions.seed;
  } else {
    config.seed = env_seed().value_or(0);
  }
  config.interventions = parse_interventions(opts.interventions);
  config.max_rejection_factor = opts.max_rejection_factor;
  config.threads = opts.threads;

  const Dataset ds = simulate(loaded.model, config, registry);
  const fs::path out_dir = opts.out_dir ? fs::path(*opts.out_dir)
                                        : instructions.output_dir.value_or(fs::path("."));
  // Write with the effective model so the stratify/observed layout matches
  // the dataset; the manifest hashes the model as loaded.
  const auto effective = apply_interventions(loaded.model, config.interventions, registry);
  const auto paths = write_csv(ds, effective, instructions, out_dir);
  const auto manifest = write_manifest(ds, loaded.model, config, instructions, paths, out_dir);
  err << "kept " << ds.rows.size() << " of " << ds.attempts << " attempted samples\n";
  for (const auto& p : paths) err << "wrote " << p.string() << "\n";
  err << "wrote " << manifest.string() << "\n";
  return kOk;
}

int cmd_functions(const Options& opts, std::ostream& out) {
  const auto registry = make_registry(opts);
  for (const auto* e : registry.entries()) {
    out << e->name << "/" << e->arity.describe() << (e->stochastic ? " [stochastic]" : "")
        << (e->builtin ? "" : " [host]") << "  " << e->summary << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dagforge: simulate datasets from DAG models written in YAML", "dagforge"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", opts.spec_path, "model YAML file")->required();
    sub->add_flag("--no-example-functions", opts.no_example_functions,
                  "do not register the host functions used by the bundled models");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check a model and print its summary");
  add_common(validate_cmd);

  auto* run_cmd = app.add_subcommand("run", "simulate a model and write CSV output");
  add_common(run_cmd);
  run_cmd->add_option("--seed", opts.seed, "random seed (overrides the model and DAGFORGE_SEED)");
  run_cmd->add_option("--num-samples", opts.num_samples, "number of rows to keep");
  run_cmd->add_option("--out", opts.out_dir, "output directory");
  run_cmd->add_option("--intervene", opts.interventions, "NODE=EXPR replacement (repeatable)")
      ->take_all()
      ->allow_extra_args(false);
  run_cmd->add_option("--max-rejection-factor", opts.max_rejection_factor,
                      "give up after num_samples * N attempts")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", opts.threads, "worker threads (output is identical)")
      ->check(CLI::Range(1u, 1024u));

  auto* graph_cmd = app.add_subcommand("graph", "print the model graph");
  add_common(graph_cmd);
  graph_cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"dot"}));

  auto* functions_cmd = app.add_subcommand("functions", "list available functions");
  functions_cmd->add_flag("--no-example-functions", opts.no_example_functions,
                          "hide the bundled example host functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSyntax;
  }

  try {
    if (*validate_cmd) return cmd_validate(opts, out, err);
    if (*graph_cmd) return cmd_graph(opts, out, err);
    if (*run_cmd) return cmd_run(opts, out, err);
    if (*functions_cmd) return cmd_functions(opts, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSyntax;
  } catch (const YamlSyntaxError& e) {
    err << "error: invalid YAML: " << e.what() << "\n";
    return kIoOrSyntax;
  } catch (const SelectionStarvation& e) {
    err << "error: " << e.what() << "\n";
    return kStarvation;
  } catch (const Error& e) {
    // Schema, validation, evaluation and stratum-label errors all mean the
    // model (or an override) is wrong.
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoOrSyntax;
  }
  return kIoOrSyntax;
}

}  // namespace dagforge::cli

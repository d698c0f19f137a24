#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "dagforge/example_functions.hpp"
#include "dagforge/expr.hpp"
#include "dagforge/graph.hpp"
#include "dagforge/model.hpp"
#include "dagforge/output.hpp"
#include "dagforge/random.hpp"
#include "dagforge/registry.hpp"
#include "dagforge/sampler.hpp"

namespace py = pybind11;
using namespace dagforge;

namespace {

py::object to_python(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Missing: return py::none();
    case Value::Kind::Bool: return py::bool_(v.as_bool());
    case Value::Kind::Int: return py::int_(v.as_int());
    case Value::Kind::Float: return py::float_(v.as_float());
    case Value::Kind::Str: return py::str(v.as_str());
    case Value::Kind::List: {
      py::list out;
      for (const auto& item : v.as_list()) out.append(to_python(item));
      return std::move(out);
    }
    case Value::Kind::Tensor: {
      py::dict out;
      out["shape"] = v.as_tensor().shape;
      out["data"] = v.as_tensor().data;
      return std::move(out);
    }
  }
  return py::none();
}

Value from_python(const py::handle& h) {
  if (h.is_none()) return Value::missing();
  if (py::isinstance<py::bool_>(h)) return Value::boolean(h.cast<bool>());
  if (py::isinstance<py::int_>(h)) return Value::integer(h.cast<std::int64_t>());
  if (py::isinstance<py::float_>(h)) return Value::real(h.cast<double>());
  if (py::isinstance<py::str>(h)) return Value::str(h.cast<std::string>());
  if (py::isinstance<py::dict>(h)) {
    auto d = h.cast<py::dict>();
    if (!d.contains("shape") || !d.contains("data"))
      throw DomainError("a dict converts to a tensor only with 'shape' and 'data' keys");
    Tensor t{d["shape"].cast<std::vector<std::int64_t>>(), d["data"].cast<std::vector<double>>()};
    check_tensor(t);
    return Value::tensor(std::move(t));
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    List items;
    for (const auto& item : h) items.push_back(from_python(item));
    return Value::list(std::move(items));
  }
  throw DomainError("cannot convert Python " + std::string(py::str(py::type::handle_of(h).attr("__name__"))) +
                    " to a value");
}

/// Thin view of the per-call random stream handed to stochastic Python
/// functions. Valid only during the call.
struct PyStream {
  RandomStream* rng;
  RandomStream& get() const {
    if (!rng) throw DomainError("random stream used outside its call");
    return *rng;
  }
};

struct Registry {
  std::shared_ptr<FunctionRegistry> impl = std::make_shared<FunctionRegistry>();

  void register_function(const std::string& name, py::function fn, std::size_t min_arity,
                         std::optional<std::size_t> max_arity, bool stochastic,
                         const std::string& summary) {
    // The callable may be copied or destroyed on a worker thread.
    std::shared_ptr<py::function> held(new py::function(std::move(fn)), [](py::function* f) {
      py::gil_scoped_acquire gil;
      delete f;
    });
    Callable impl_fn = [held, stochastic](std::span<const Value> args, RandomStream* rng) {
      py::gil_scoped_acquire gil;
      py::list py_args;
      for (const auto& a : args) py_args.append(to_python(a));
      py::object stream = py::cast(PyStream{rng});
      auto detach = [&] { stream.cast<PyStream&>().rng = nullptr; };
      try {
        py::object result = stochastic ? (*held)(*py_args, stream) : (*held)(*py_args);
        detach();
        return from_python(result);
      } catch (py::error_already_set& e) {
        detach();
        throw DomainError(e.what());
      }
    };
    register_host_function(*impl, name, Arity{min_arity, max_arity.value_or(min_arity)}, stochastic,
                           std::move(impl_fn), summary);
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto* e : impl->entries()) out.push_back(e->name);
    return out;
  }
};

Registry default_registry(bool example_functions) {
  Registry r;
  if (example_functions) register_example_functions(*r.impl);
  return r;
}

struct Model {
  ModelSpec spec;
  CompiledModel compiled;
  std::shared_ptr<FunctionRegistry> registry;
};

Model model_from_yaml(const std::string& text, std::optional<Registry> registry) {
  auto reg = registry ? registry->impl : default_registry(true).impl;
  ModelSpec spec = parse_model(text);
  CompiledModel compiled = validate(spec, *reg);
  return Model{std::move(spec), std::move(compiled), std::move(reg)};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PyDataset {
  Dataset ds;
  RunConfig config;
  std::shared_ptr<const Model> model;
};

PyDataset simulate_model(const std::shared_ptr<const Model>& model,
                         std::optional<std::uint64_t> num_samples, std::optional<std::uint64_t> seed,
                         const std::map<std::string, std::string>& interventions, unsigned threads,
                         std::uint64_t max_rejection_factor) {
  RunConfig cfg;
  cfg.num_samples = num_samples.value_or(model->spec.instructions.num_samples);
  cfg.seed = seed.value_or(model->spec.instructions.seed.value_or(0));
  for (const auto& [target, src] : interventions) cfg.interventions.emplace_back(target, parse(src));
  cfg.threads = threads;
  cfg.max_rejection_factor = max_rejection_factor;
  Dataset ds;
  {
    py::gil_scoped_release release;
    ds = simulate(model->compiled, cfg, *model->registry);
  }
  return PyDataset{std::move(ds), std::move(cfg), model};
}

py::list dataset_rows(const PyDataset& d, bool all_nodes) {
  const auto& ds = d.ds;
  std::vector<std::size_t> idx;
  if (all_nodes) {
    for (std::size_t i = 0; i < ds.node_names.size(); ++i) idx.push_back(i);
  } else {
    idx = ds.column_indices();
  }
  py::list out;
  for (const auto& row : ds.rows) {
    py::dict r;
    for (auto i : idx) r[py::str(ds.node_names[i])] = to_python(row.values[i]);
    out.append(std::move(r));
  }
  return out;
}

std::vector<std::filesystem::path> dataset_write(const PyDataset& d,
                                                 std::optional<std::filesystem::path> out_dir) {
  const auto& instr = d.model->spec.instructions;
  const auto dir = out_dir ? *out_dir : instr.output_dir.value_or(std::filesystem::path("."));
  const auto effective =
      apply_interventions(d.model->compiled, d.config.interventions, *d.model->registry);
  auto paths = write_csv(d.ds, effective, instr, dir);
  paths.push_back(write_manifest(d.ds, d.model->compiled, d.config, instr, paths, dir));
  return paths;
}

Value eval_expr(const std::string& src, const std::map<std::string, py::object>& bindings,
                std::uint64_t seed, std::uint64_t index, std::optional<Registry> registry) {
  const auto reg = registry ? registry->impl : default_registry(true).impl;
  const auto e = parse(src);
  RandomStream rng(seed, index);
  EvalEnv env{{}, &rng, reg.get()};
  for (const auto& [name, v] : bindings) env.bindings.emplace(name, from_python(v));
  return eval(*e, env);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DAG model simulation engine";
  m.attr("__version__") = std::string(kEngineVersion);

  auto base = py::register_exception<Error>(m, "DagforgeError", PyExc_RuntimeError);
  py::register_exception<LexError>(m, "LexError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<EvalError>(m, "EvalError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<RegistryError>(m, "RegistryError", base);
  auto spec_error = py::register_exception<SpecError>(m, "SpecError", base);
  py::register_exception<YamlSyntaxError>(m, "YamlSyntaxError", spec_error);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<CycleError>(m, "CycleError", base);
  py::register_exception<CoercionError>(m, "CoercionError", base);
  py::register_exception<SelectionStarvation>(m, "SelectionStarvation", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<StratumNameError>(m, "StratumNameError", base);

  m.def(
      "tokenize",
      [](const std::string& src) {
        std::vector<py::tuple> out;
        for (const auto& t : tokenize(src))
          out.push_back(py::make_tuple(std::string(token_kind_name(t.kind)), t.text, t.span.begin,
                                       t.span.end));
        return out;
      },
      py::arg("src"), "List of (kind, text, begin, end) tuples.");
  m.def(
      "pretty", [](const std::string& src) { return pretty_print(*parse(src)); }, py::arg("src"),
      "Parse and print in canonical form.");
  m.def(
      "free_refs", [](const std::string& src) { return free_refs(*parse(src)); }, py::arg("src"));
  m.def(
      "eval_expr",
      [](const std::string& src, const std::map<std::string, py::object>& bindings,
         std::uint64_t seed, std::uint64_t index, std::optional<Registry> registry) {
        return to_python(eval_expr(src, bindings, seed, index, std::move(registry)));
      },
      py::arg("src"), py::arg("bindings") = std::map<std::string, py::object>{},
      py::arg("seed") = 0, py::arg("index") = 0, py::arg("registry") = py::none());
  m.def("csv_cell", [](const py::object& v) { return csv_cell(from_python(v)); }, py::arg("value"));
  m.def("parse_cell", [](const std::string& s) { return to_python(parse_cell(s)); },
        py::arg("cell"));

  m.def("detect_cycle", &detect_cycle, py::arg("parents"),
        "A cycle as a list of names, or None.");
  m.def(
      "topo_sort",
      [](const std::vector<std::string>& nodes, const ParentMap& parents) {
        return topo_sort(nodes, parents);
      },
      py::arg("nodes"), py::arg("parents"));

  py::class_<PyStream>(m, "RandomStream")
      .def("random", [](PyStream& s) { return s.get().next_double(); })
      .def("next_u64", [](PyStream& s) { return s.get().next_u64(); });

  py::class_<Registry>(m, "Registry")
      .def(py::init(&default_registry), py::arg("example_functions") = true)
      .def("register_function", &Registry::register_function, py::arg("name"), py::arg("fn"),
           py::arg("arity"), py::arg("max_arity") = py::none(), py::arg("stochastic") = false,
           py::arg("summary") = "")
      .def("names", &Registry::names)
      .def("__contains__", [](const Registry& r, const std::string& n) { return r.impl->contains(n); });

  py::class_<Model, std::shared_ptr<Model>>(m, "Model")
      .def_static(
          "from_yaml",
          [](const std::string& text, std::optional<Registry> registry) {
            return std::make_shared<Model>(model_from_yaml(text, std::move(registry)));
          },
          py::arg("text"), py::arg("registry") = py::none())
      .def_static(
          "from_file",
          [](const std::filesystem::path& path, std::optional<Registry> registry) {
            return std::make_shared<Model>(model_from_yaml(read_text(path), std::move(registry)));
          },
          py::arg("path"), py::arg("registry") = py::none())
      .def_property_readonly("nodes",
                             [](const Model& md) {
                               std::vector<std::string> out;
                               for (const auto& n : md.compiled.nodes) out.push_back(n.name);
                               return out;
                             })
      .def_property_readonly("topo_order", [](const Model& md) { return md.compiled.topo_order; })
      .def_property_readonly("parents", [](const Model& md) { return md.compiled.parents; })
      .def_property_readonly("columns", [](const Model& md) { return md.compiled.output_columns(); })
      .def_property_readonly("warnings", [](const Model& md) { return md.spec.warnings; })
      .def_property_readonly("csv_name", [](const Model& md) { return md.spec.instructions.csv_name; })
      .def_property_readonly("hash", [](const Model& md) { return model_hash(md.compiled); })
      .def("to_dot", [](const Model& md) { return to_dot(md.compiled); })
      .def("simulate", &simulate_model, py::arg("num_samples") = py::none(),
           py::arg("seed") = py::none(),
           py::arg("interventions") = std::map<std::string, std::string>{},
           py::arg("threads") = 1u, py::arg("max_rejection_factor") = 1000u);

  py::class_<PyDataset>(m, "Dataset")
      .def_property_readonly("columns", [](const PyDataset& d) { return d.ds.column_order; })
      .def_property_readonly("attempts", [](const PyDataset& d) { return d.ds.attempts; })
      .def_property_readonly("strata",
                             [](const PyDataset& d) {
                               std::vector<std::optional<std::string>> out;
                               for (const auto& r : d.ds.rows) out.push_back(r.stratum);
                               return out;
                             })
      .def("rows", &dataset_rows, py::arg("all_nodes") = false,
           "Rows as dicts keyed by column name.")
      .def("write_csv", &dataset_write, py::arg("out_dir") = py::none(),
           "Write CSV files and the manifest; returns the written paths.")
      .def("__len__", [](const PyDataset& d) { return d.ds.rows.size(); });
}

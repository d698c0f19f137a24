#include <doctest.h>

#include "dagforge/output.hpp"
#include "fixtures.hpp"

using namespace dagforge;
using fixture::doc;
namespace fs = std::filesystem;

namespace {

const FunctionRegistry& reg() { return fixture::example_registry(); }

struct Run {
  CompiledModel model;
  ModelSpec spec;
  Dataset ds;
  RunConfig cfg;
};

Run simulate_doc(const std::string& yaml, std::uint64_t n, std::uint64_t seed = 0) {
  Run r;
  r.spec = parse_model(yaml);
  r.model = validate(r.spec, reg());
  r.cfg.num_samples = n;
  r.cfg.seed = seed;
  r.ds = simulate(r.model, r.cfg, reg());
  return r;
}

std::vector<std::vector<std::string>> read_strict(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  REQUIRE(oracle::read_csv_strict(oracle::slurp(p), rows));
  return rows;
}

}  // namespace

TEST_SUITE("output") {
  TEST_CASE("RFC 4180 fields") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_field("cr\r") == "\"cr\r\"");
    CHECK(csv_field("") == "");
  }

  TEST_CASE("bioseq model columns") {
    oracle::TempDir dir("out-bioseq");
    const auto spec = parse_model(fixture::model_text("bioseq.yaml"));
    const auto model = validate(spec, reg());
    RunConfig cfg;
    cfg.num_samples = 50;
    const auto ds = simulate(model, cfg, reg());
    const auto paths = write_csv(ds, model, spec.instructions, dir.path());
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].filename() == "BioseqExample_yaml.csv");
    const auto rows = read_strict(paths[0]);
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == std::vector<std::string>{"Disease", "Age", "Protocol", "kmerVec"});
    for (std::size_t r = 1; r < rows.size(); ++r) {
      CHECK(rows[r].size() == 4);
      CHECK(parse_cell(rows[r][3]).as_list().size() == 16);
    }
  }

  TEST_CASE("missing values are empty cells") {
    oracle::TempDir dir("out-missing");
    const auto r = simulate_doc(
        doc("    A: \"1\"\n    B: \"2\"\n"
            "    M:\n      function: \"1\"\n      kind: missing\n      underlying: B\n"
            "    C: \"3\"\n"),
        2);
    const auto paths = write_csv(r.ds, r.model, r.spec.instructions, dir.path());
    CHECK(oracle::slurp(paths[0]) == "A,B,M,C\n1,2,,3\n1,2,,3\n");
  }

  TEST_CASE("every cell kind survives a strict reader") {
    oracle::TempDir dir("out-kinds");
    const auto r = simulate_doc(
        doc("    S: \"\\\"a,b \\\\\\\"q\\\\\\\"\\\"\"\n    L: \"[1, \\\"x,y\\\", [true]]\"\n"
            "    T: tensor_zeros([2, 2])\n    F: uniform(0, 1)\n    B: \"1 < 2\"\n"),
        25);
    const auto paths = write_csv(r.ds, r.model, r.spec.instructions, dir.path());
    const auto rows = read_strict(paths[0]);
    REQUIRE(rows.size() == 26);
    for (const auto& row : rows) CHECK(row.size() == 5);
    CHECK(rows[1][0] == "a,b \"q\"");
    CHECK(rows[1][1] == "[1,\"x,y\",[true]]");
    CHECK(rows[1][2] == "{\"shape\":[2,2],\"data\":[0.0,0.0,0.0,0.0]}");
    CHECK(rows[1][4] == "true");
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(values_identical(parse_cell(rows[i][3]), r.ds.at(i - 1, "F")));
  }

  TEST_CASE("stratified files partition the rows") {
    oracle::TempDir dir("out-strata");
    const auto r = simulate_doc(
        doc("    U: randint(0, 1000000)\n    G: choice([\"a\", \"b\"])\n"
            "    T:\n      function: G\n      kind: stratify\n"),
        50);
    const auto paths = write_csv(r.ds, r.model, r.spec.instructions, dir.path());
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].filename() == "out_a.csv");
    CHECK(paths[1].filename() == "out_b.csv");
    std::multiset<std::string> seen;
    std::size_t total = 0;
    for (const auto& p : paths) {
      const auto rows = read_strict(p);
      CHECK(rows[0] == std::vector<std::string>{"U", "G", "T"});
      const std::string label = p.stem().string().substr(4);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][2] == label);
        seen.insert(rows[i][0] + "|" + rows[i][1]);
        ++total;
      }
    }
    CHECK(total == 50);
    std::multiset<std::string> want;
    for (std::size_t i = 0; i < r.ds.rows.size(); ++i)
      want.insert(csv_cell(r.ds.at(i, "U")) + "|" + csv_cell(r.ds.at(i, "G")));
    CHECK(seen == want);
  }

  TEST_CASE("bad stratum labels are rejected before anything is written") {
    for (const char* label : {"a/b", "..", "a b", ""}) {
      oracle::TempDir dir("out-badlabel");
      const auto r = simulate_doc(
          doc(std::string("    G: \"\\\"") + label + "\\\"\"\n    T:\n      function: G\n"
                                                   "      kind: stratify\n"),
          3);
      CHECK_THROWS_AS(write_csv(r.ds, r.model, r.spec.instructions, dir.path()), StratumNameError);
      CHECK(fs::is_empty(dir.path()));
    }
  }

  TEST_CASE("unwritable destination is an IoError") {
    oracle::TempDir dir("out-io");
    oracle::spit(dir / "blocker", "x");
    const auto r = simulate_doc(doc("    X: \"1\"\n"), 1);
    CHECK_THROWS_AS(write_csv(r.ds, r.model, r.spec.instructions, dir / "blocker" / "sub"), IoError);
  }

  TEST_CASE("manifest") {
    oracle::TempDir dir("out-manifest");
    auto r = simulate_doc(doc("    X: uniform(0, 1)\n"), 5, 7);
    r.cfg.seed = 7;
    const auto paths = write_csv(r.ds, r.model, r.spec.instructions, dir.path());
    const auto mpath = write_manifest(r.ds, r.model, r.cfg, r.spec.instructions, paths, dir.path());
    CHECK(mpath.filename() == "out.manifest");
    const auto text = oracle::slurp(mpath);
    CHECK(text.find("\nseed=7\n") != std::string::npos);
    CHECK(text.find("\nnum_samples=5\n") != std::string::npos);
    CHECK(text.find("\nattempts=5\n") != std::string::npos);
    CHECK(text.find("\nengine_version=0.1.0\n") != std::string::npos);
    CHECK(text.find("\nfiles=out.csv\n") != std::string::npos);
    CHECK(text.find("\nmodel_hash=" + model_hash(r.model) + "\n") != std::string::npos);

    // Only the timestamp line may differ between identical runs.
    const auto a = manifest_text(r.ds, r.model, r.cfg, paths, "T1");
    const auto b = manifest_text(r.ds, r.model, r.cfg, paths, "T2");
    CHECK(a.substr(0, a.rfind("timestamp=")) == b.substr(0, b.rfind("timestamp=")));
    CHECK(a != b);

    const auto other = simulate_doc(doc("    X: uniform(0, 2)\n"), 5, 7);
    CHECK(manifest_text(other.ds, other.model, r.cfg, paths, "T1") != a);
  }

  TEST_CASE("equal seeds give byte-identical files") {
    oracle::TempDir d1("out-det1"), d2("out-det2");
    for (const auto* file : {"images.yaml", "bioseq.yaml", "clinic.yaml"}) {
      const auto spec = parse_model(fixture::model_text(file));
      const auto model = validate(spec, reg());
      RunConfig cfg;
      cfg.num_samples = 40;
      cfg.seed = 42;
      const auto p1 = write_csv(simulate(model, cfg, reg()), model, spec.instructions, d1.path());
      const auto p2 = write_csv(simulate(model, cfg, reg()), model, spec.instructions, d2.path());
      REQUIRE(p1.size() == p2.size());
      for (std::size_t i = 0; i < p1.size(); ++i) CHECK(oracle::slurp(p1[i]) == oracle::slurp(p2[i]));
    }
  }
}

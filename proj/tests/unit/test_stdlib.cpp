#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "dagforge/errors.hpp"
#include "dagforge/expr.hpp"
#include "dagforge/random.hpp"
#include "dagforge/registry.hpp"
#include "dagforge/stdlib.hpp"
#include "fixtures.hpp"

using namespace dagforge;

namespace {

constexpr int kN = 100000;

const FunctionRegistry& registry() {
  static const FunctionRegistry r;
  return r;
}

Value call(const std::string& src, std::uint64_t idx = 0, std::uint64_t seed = 0) {
  RandomStream rng(seed, idx);
  EvalEnv env{{}, &rng, &registry()};
  return eval(*parse(src), env);
}

/// Sample mean of n evaluations, one fresh per-sample stream each.
double sample_mean(const std::string& src, int n = kN) {
  const auto e = parse(src);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream rng(0, static_cast<std::uint64_t>(i), 17);
    EvalEnv env{{}, &rng, &registry()};
    total += eval(*e, env).to_double();
  }
  return total / n;
}

void check_moment(const std::string& src, double mean, double sd) {
  const double got = sample_mean(src);
  const double bound = 3.0 * sd / std::sqrt(static_cast<double>(kN));
  INFO(src << ": mean " << got << ", expected " << mean << " +- " << bound);
  CHECK(std::abs(got - mean) <= bound);
}

/// Binomial CDF from exact pmf terms C(n,k) p^k (1-p)^(n-k).
std::int64_t binomial_by_table(double u, std::int64_t n, double p) {
  double cdf = 0.0;
  double choose = 1.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    if (k > 0) choose = choose * static_cast<double>(n - k + 1) / static_cast<double>(k);
    cdf += choose * std::pow(p, static_cast<double>(k)) * std::pow(1 - p, static_cast<double>(n - k));
    if (u < cdf) return k;
  }
  return n;
}

std::int64_t poisson_by_table(double u, double lambda) {
  double cdf = 0.0;
  double term = std::exp(-lambda);
  for (std::int64_t k = 0;; ++k) {
    if (k > 0) term *= lambda / static_cast<double>(k);
    cdf += term;
    if (u < cdf) return k;
  }
}

/// Every window of every sequence, counted by a map keyed on the text.
std::vector<std::int64_t> kmers_by_scan(const std::vector<std::string>& seqs, std::size_t k,
                                        const std::string& alphabet) {
  std::vector<std::string> all = {""};
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::string> next;
    for (const auto& p : all)
      for (char c : alphabet) next.push_back(p + c);
    all = next;
  }
  std::map<std::string, std::int64_t> counts;
  for (const auto& s : seqs)
    for (std::size_t i = 0; i + k <= s.size(); ++i) counts[s.substr(i, k)]++;
  std::vector<std::int64_t> out;
  for (const auto& kmer : all) out.push_back(counts.count(kmer) ? counts[kmer] : 0);
  return out;
}

std::vector<std::int64_t> ints(const Value& v) {
  std::vector<std::int64_t> out;
  for (const auto& x : v.as_list()) out.push_back(x.as_int());
  return out;
}

}  // namespace

TEST_SUITE("stdlib") {
  TEST_CASE("degenerate and forced draws") {
    CHECK(values_identical(call("uniform(0, 0)"), Value::real(0.0)));
    CHECK(values_identical(call("uniform(2, 2)"), Value::real(2.0)));
    CHECK(values_identical(call("binomial(1, 0.0)"), Value::integer(0)));
    CHECK(values_identical(call("binomial(1, 1.0)"), Value::integer(1)));
    CHECK(values_identical(call("binomial(0, 0.5)"), Value::integer(0)));
    CHECK(values_identical(call("randint(5, 6)"), Value::integer(5)));
    CHECK(values_identical(call("poisson(0)"), Value::integer(0)));
    CHECK(values_identical(call("normal(3, 0)"), Value::real(3.0)));
    CHECK(values_identical(call("random_seq(\"A\", 4)"), Value::str("AAAA")));
    CHECK(values_identical(call("random_seq(\"ACGT\", 0)"), Value::str("")));
    CHECK(values_identical(call("categorical([0, 1, 0])"), Value::integer(1)));
    CHECK(values_identical(call("choice([\"x\"])"), Value::str("x")));
  }

  TEST_CASE("domain errors") {
    for (const char* src :
         {"uniform(1, 0)", "binomial(1, 1.5)", "binomial(-1, 0.5)", "binomial(1, -0.1)",
          "randint(5, 4)", "randint(5, 5)", "normal(0, -1)", "poisson(-1)", "poisson(1e8)",
          "categorical([0.5, 0.6])", "categorical([])", "categorical([1.5, -0.5])",
          "choice([])", "choice([1, 2], [1])", "random_seq(\"\", 3)", "random_seq(\"AC\", -1)",
          "implant(\"AAAA\", \"CG\", 3)", "implant(\"AAAA\", \"C\", -1)", "log(0)", "sqrt(-1)",
          "kmer_counts([\"AXA\"], 1, \"AC\")", "kmer_counts([\"A\"], 0, \"AC\")",
          "tensor_zeros([2, 0])", "tensor_zeros([])",
          "tensor_fill_rect(tensor_zeros([2, 2]), 0, 0, 3, 1, 1.0)",
          "tensor_fill_rect(tensor_zeros([2]), 0, 0, 1, 1, 1.0)", "get([1], 1)",
          "slice([1, 2], 1, 3)", "floor(1e300)", "uniform(\"a\", 1)", "binomial(1.5, 0.5)",
          "clamp(1, 2, 0)"}) {
      INFO(src);
      CHECK_THROWS_AS(call(src), EvalError);
    }
  }

  TEST_CASE("uniform moments and range") {
    check_moment("uniform(0, 1)", 0.5, 1.0 / std::sqrt(12.0));
    check_moment("uniform(2, 5)", 3.5, 3.0 / std::sqrt(12.0));
    const auto e = parse("uniform(2, 5)");
    for (int i = 0; i < 10000; ++i) {
      RandomStream rng(1, static_cast<std::uint64_t>(i));
      EvalEnv env{{}, &rng, &registry()};
      const double x = eval(*e, env).as_float();
      CHECK(x >= 2.0);
      CHECK(x < 5.0);
    }
  }

  TEST_CASE("binomial and bernoulli moments") {
    check_moment("binomial(1, 0.5)", 0.5, 0.5);
    check_moment("binomial(10, 0.3)", 3.0, std::sqrt(10 * 0.3 * 0.7));
    check_moment("binomial(200, 0.01)", 2.0, std::sqrt(200 * 0.01 * 0.99));
    check_moment("bernoulli(0.2)", 0.2, std::sqrt(0.2 * 0.8));
  }

  TEST_CASE("randint moments, range and frequency") {
    // Discrete uniform on {10..79}: mean (lo + hi - 1) / 2, variance (m^2 - 1) / 12.
    check_moment("randint(10, 80)", 44.5, std::sqrt((70.0 * 70.0 - 1.0) / 12.0));
    check_moment("if randint(0, 2) == 0 then 1 else 0", 0.5, 0.5);
    const auto e = parse("randint(10, 80)");
    std::set<std::int64_t> seen;
    for (int i = 0; i < kN; ++i) {
      RandomStream rng(0, static_cast<std::uint64_t>(i));
      EvalEnv env{{}, &rng, &registry()};
      const auto v = eval(*e, env).as_int();
      CHECK(v >= 10);
      CHECK(v <= 79);
      seen.insert(v);
    }
    CHECK(seen.size() == 70);
  }

  TEST_CASE("normal and poisson moments") {
    check_moment("normal(1, 2)", 1.0, 2.0);
    check_moment("poisson(4.5)", 4.5, std::sqrt(4.5));
    check_moment("poisson(0.3)", 0.3, std::sqrt(0.3));
    check_moment("poisson(250)", 250.0, std::sqrt(250.0));
  }

  TEST_CASE("normal variance") {
    // Var of the sample variance for a Gaussian is 2 sigma^4 / (n - 1).
    const auto e = parse("normal(0, 1)");
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < kN; ++i) {
      RandomStream rng(0, static_cast<std::uint64_t>(i), 3);
      EvalEnv env{{}, &rng, &registry()};
      const double x = eval(*e, env).as_float();
      s += x;
      s2 += x * x;
    }
    const double var = (s2 - s * s / kN) / (kN - 1);
    CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / (kN - 1)));
  }

  TEST_CASE("categorical passes a chi-square test") {
    const std::vector<double> p = {0.2, 0.5, 0.3};
    const auto e = parse("categorical([0.2, 0.5, 0.3])");
    std::vector<double> counts(3, 0.0);
    for (int i = 0; i < kN; ++i) {
      RandomStream rng(0, static_cast<std::uint64_t>(i));
      EvalEnv env{{}, &rng, &registry()};
      counts[static_cast<std::size_t>(eval(*e, env).as_int())] += 1;
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double expected = p[k] * kN;
      chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    // Two degrees of freedom: the survival function is exp(-x/2).
    CHECK(std::exp(-chi2 / 2.0) > 0.001);
  }

  TEST_CASE("choice weights") {
    check_moment("choice([10, 20], [0.25, 0.75])", 17.5, std::sqrt(0.25 * 0.75) * 10.0);
    check_moment("choice([1, 2, 3, 4])", 2.5, std::sqrt((16.0 - 1.0) / 12.0));
  }

  TEST_CASE("golden first draws") {
    auto first8 = [](const std::function<double(RandomStream&)>& f) {
      RandomStream rng(42, 7, 3);
      std::vector<double> out;
      for (int i = 0; i < 8; ++i) out.push_back(f(rng));
      return out;
    };
    const std::vector<double> uniform = {0.23182300482634355, 0.34337018408980047, 0.5393511914045459,
                                         0.29382590851656287, 0.62420932988900879, 0.69752286280226883,
                                         0.97548036967783702, 0.5350895644361966};
    CHECK(first8([](RandomStream& r) { return stdlib::uniform(r, 0, 1); }) == uniform);

    const std::vector<double> normal = {-0.40205253725863238, -0.33853815701337586,
                                        -0.45299868509828539, -2.6574151436575382,
                                        -0.0028036578370040418, 0.38598236721189222,
                                        0.05681218564909396,  -0.072375504079964834};
    const auto got_normal = first8([](RandomStream& r) { return stdlib::normal(r, 0, 1); });
    for (std::size_t i = 0; i < 8; ++i) CHECK(got_normal[i] == doctest::Approx(normal[i]).epsilon(1e-12));

    CHECK(first8([](RandomStream& r) { return double(stdlib::binomial(r, 10, 0.3)); }) ==
          std::vector<double>{2, 2, 3, 2, 3, 4, 6, 3});
    CHECK(first8([](RandomStream& r) { return double(stdlib::randint(r, 10, 80)); }) ==
          std::vector<double>{26, 34, 47, 30, 53, 58, 78, 47});
    CHECK(first8([](RandomStream& r) { return double(stdlib::poisson(r, 4.5)); }) ==
          std::vector<double>{3, 4, 5, 3, 5, 5, 9, 5});
    CHECK(first8([](RandomStream& r) {
            const double p[] = {0.2, 0.5, 0.3};
            return double(stdlib::categorical(r, p));
          }) == std::vector<double>{1, 1, 1, 1, 1, 1, 2, 1});
    RandomStream r(42, 7, 3);
    std::vector<std::string> seqs;
    for (int i = 0; i < 8; ++i) seqs.push_back(stdlib::random_seq(r, "ACGT", 6));
    CHECK(seqs == std::vector<std::string>{"ACGCGG", "TGACAT", "AAAGTA", "ACGTCC", "TACGAA",
                                           "ATGTAA", "TCATGC", "TCGGGT"});
  }

  TEST_CASE("draws match inversion of the raw stream") {
    for (std::uint64_t idx = 0; idx < 2000; ++idx) {
      RandomStream raw(5, idx), lib(5, idx);
      const double u = static_cast<double>(raw.next_u64() >> 11) * 0x1.0p-53;
      const double v = static_cast<double>(raw.next_u64() >> 11) * 0x1.0p-53;
      const std::uint64_t w = raw.next_u64();
      const std::uint64_t x = raw.next_u64();
      const double y = static_cast<double>(raw.next_u64() >> 11) * 0x1.0p-53;

      CHECK(stdlib::binomial(lib, 12, 0.35) == binomial_by_table(u, 12, 0.35));
      CHECK(stdlib::poisson(lib, 3.2) == poisson_by_table(v, 3.2));
      // Multiply-high scaling: floor(w * 70 / 2^64).
      __extension__ const auto scaled = static_cast<std::int64_t>((static_cast<unsigned __int128>(w) * 70) >> 64);
      CHECK(stdlib::randint(lib, 10, 80) == 10 + scaled);
      __extension__ const auto letter = static_cast<std::size_t>((static_cast<unsigned __int128>(x) * 4) >> 64);
      CHECK(stdlib::random_seq(lib, "ACGT", 1) == std::string(1, "ACGT"[letter]));
      const double p[] = {0.1, 0.6, 0.3};
      CHECK(stdlib::categorical(lib, p) == (y < 0.1 ? 0 : y < 0.7 ? 1 : 2));
      CHECK(lib.draw_counter() == 5);
    }
  }

  TEST_CASE("fixed draw counts") {
    auto draws = [](const std::string& src) {
      RandomStream rng(0, 0);
      EvalEnv env{{}, &rng, &registry()};
      eval(*parse(src), env);
      return rng.draw_counter();
    };
    CHECK(draws("uniform(0, 1)") == 1);
    CHECK(draws("uniform(3, 3)") == 1);
    CHECK(draws("normal(0, 1)") == 2);
    CHECK(draws("binomial(50, 0.5)") == 1);
    CHECK(draws("binomial(1, 0.0)") == 1);
    CHECK(draws("bernoulli(0.5)") == 1);
    CHECK(draws("randint(0, 1000)") == 1);
    CHECK(draws("poisson(9)") == 1);
    CHECK(draws("categorical([0.5, 0.5])") == 1);
    CHECK(draws("choice([1, 2, 3])") == 1);
    CHECK(draws("random_seq(\"ACGT\", 12)") == 12);
    CHECK(draws("sigmoid(1)") == 0);
  }

  TEST_CASE("math helpers") {
    CHECK(values_identical(call("sigmoid(0)"), Value::real(0.5)));
    CHECK(call("sigmoid(2)").as_float() == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
    CHECK(call("exp(1)").as_float() == doctest::Approx(std::numbers::e));
    CHECK(call("log(1)").as_float() == 0.0);
    CHECK(values_identical(call("abs(-3)"), Value::integer(3)));
    CHECK(values_identical(call("abs(-3.5)"), Value::real(3.5)));
    CHECK(values_identical(call("floor(-2.5)"), Value::integer(-3)));
    CHECK(values_identical(call("round(2.5)"), Value::integer(3)));
    CHECK(values_identical(call("round(-2.5)"), Value::integer(-3)));
    CHECK(values_identical(call("min(3, 1.5, 2)"), Value::real(1.5)));
    CHECK(values_identical(call("max(3, 1.5, 7)"), Value::integer(7)));
    CHECK(values_identical(call("clamp(5, 0, 3)"), Value::integer(3)));
    CHECK(values_identical(call("clamp(-1.5, 0, 3)"), Value::integer(0)));
    CHECK(values_identical(call("pow(2, 10)"), Value::real(1024.0)));
    CHECK(values_identical(call("sqrt(9)"), Value::real(3.0)));
  }

  TEST_CASE("list and string helpers") {
    CHECK(values_identical(call("len([1, 2, 3])"), Value::integer(3)));
    CHECK(values_identical(call("len(\"ACGT\")"), Value::integer(4)));
    CHECK(values_identical(call("get([4, 5], 1)"), Value::integer(5)));
    CHECK(values_identical(call("get(\"ACGT\", 2)"), Value::str("G")));
    CHECK(values_equal(call("slice([1, 2, 3, 4], 1, 3)"), Value::list({Value::integer(2), Value::integer(3)})));
    CHECK(values_identical(call("slice(\"ACGT\", 1, 3)"), Value::str("CG")));
    CHECK(values_identical(call("concat(\"AC\", \"GT\")"), Value::str("ACGT")));
    CHECK(values_equal(call("concat([1], [2])"), Value::list({Value::integer(1), Value::integer(2)})));
    CHECK(values_identical(call("str(0.5)"), Value::str("0.5")));
  }

  TEST_CASE("implant") {
    CHECK(stdlib::implant("AAAA", "CG", 1) == "ACGA");
    CHECK(stdlib::implant("AAAA", "", 2) == "AAAA");
    CHECK(stdlib::implant("AAAA", "", 4) == "AAAA");
    CHECK(stdlib::implant("AC", "AC", 0) == "AC");
    // Oracle: prefix + motif + suffix.
    const std::string seq = "ACGTACGTAC";
    for (std::size_t pos = 0; pos <= seq.size() - 3; ++pos)
      CHECK(stdlib::implant(seq, "TTT", static_cast<std::int64_t>(pos)) ==
            seq.substr(0, pos) + "TTT" + seq.substr(pos + 3));
  }

  TEST_CASE("kmer counts") {
    CHECK(ints(call("kmer_counts([\"ACGT\"], 1, \"ACGT\")")) == std::vector<std::int64_t>{1, 1, 1, 1});
    CHECK(ints(call("kmer_counts([\"AAA\"], 2, \"AC\")")) == std::vector<std::int64_t>{2, 0, 0, 0});
    CHECK(ints(call("kmer_counts([], 1, \"ACGT\")")) == std::vector<std::int64_t>{0, 0, 0, 0});
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 200; ++trial) {
      const std::string alphabet = trial % 2 ? "ACGT" : "TGA";
      const std::size_t k = 1 + gen() % 3;
      std::vector<std::string> seqs(gen() % 4);
      for (auto& s : seqs)
        for (std::size_t i = gen() % 15; i > 0; --i) s += alphabet[gen() % alphabet.size()];
      CHECK(stdlib::kmer_counts(seqs, static_cast<std::int64_t>(k), alphabet) ==
            kmers_by_scan(seqs, k, alphabet));
    }
  }

  TEST_CASE("tensors") {
    const auto z = stdlib::tensor_zeros(std::vector<std::int64_t>{2, 2});
    CHECK(z.shape == std::vector<std::int64_t>{2, 2});
    CHECK(z.data == std::vector<double>{0, 0, 0, 0});
    CHECK(stdlib::tensor_zeros(std::vector<std::int64_t>{1}).data.size() == 1);
    CHECK(stdlib::tensor_zeros(std::vector<std::int64_t>{3, 4}).data.size() == 12);

    CHECK(stdlib::tensor_fill_rect(z, 0, 0, 1, 1, 1.0).data == std::vector<double>{1, 0, 0, 0});
    CHECK(stdlib::tensor_fill_rect(z, 0, 0, 0, 0, 9.0).data == z.data);
    const auto row = stdlib::tensor_zeros(std::vector<std::int64_t>{1, 3});
    CHECK(stdlib::tensor_fill_rect(row, 0, 0, 1, 3, 2.0).data == std::vector<double>{2, 2, 2});

    // Index oracle on a 4x5 grid.
    const auto grid = stdlib::tensor_zeros(std::vector<std::int64_t>{4, 5});
    const auto filled = stdlib::tensor_fill_rect(grid, 1, 2, 3, 5, 7.0);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 5; ++c)
        CHECK(filled.data[static_cast<std::size_t>(r * 5 + c)] ==
              ((r >= 1 && r < 3 && c >= 2 && c < 5) ? 7.0 : 0.0));
    CHECK(grid.data == std::vector<double>(20, 0.0));

    const auto v = call("tensor_fill_rect(tensor_zeros([3, 3]), 0, 0, 2, 2, 0.5)");
    CHECK(call("tensor_sum(tensor_fill_rect(tensor_zeros([3, 3]), 0, 0, 2, 2, 0.5))").as_float() == 2.0);
    CHECK(v.as_tensor().data.size() == 9);
  }

  TEST_CASE("host registration") {
    FunctionRegistry r;
    int calls = 0;
    register_host_function(r, "count_me", Arity::fixed(1), false,
                           [&](std::span<const Value> a, RandomStream*) {
                             ++calls;
                             return a[0];
                           });
    RandomStream rng(0, 0);
    EvalEnv env{{}, &rng, &r};
    CHECK(values_identical(eval(*parse("count_me(4)"), env), Value::integer(4)));
    CHECK(calls == 1);
    CHECK_THROWS_AS(register_host_function(r, "uniform", Arity::fixed(2), true,
                                           [](std::span<const Value>, RandomStream*) { return Value(); }),
                    RegistryError);
    CHECK_THROWS_AS(register_host_function(r, "count_me", Arity::fixed(1), false,
                                           [](std::span<const Value>, RandomStream*) { return Value(); }),
                    RegistryError);
    CHECK_THROWS_AS(register_host_function(r, "bad name", Arity::fixed(1), false,
                                           [](std::span<const Value>, RandomStream*) { return Value(); }),
                    RegistryError);
    CHECK_THROWS_AS(register_host_function(r, "if", Arity::fixed(1), false,
                                           [](std::span<const Value>, RandomStream*) { return Value(); }),
                    RegistryError);
  }

  TEST_CASE("example host functions") {
    const auto& r = fixture::example_registry();
    auto ex = [&](const std::string& src, std::uint64_t idx = 0) {
      RandomStream rng(0, idx);
      EvalEnv env{{}, &rng, &r};
      return eval(*parse(src), env);
    };
    CHECK(values_identical(ex("complement_binomial(1.0)"), Value::integer(0)));
    CHECK(values_identical(ex("complement_binomial(0.0)"), Value::integer(1)));
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto r1 = ex("sigmoid_binomial(1, 0, \"H\")", i).as_int();
      CHECK((r1 == 0 || r1 == 1));
      const auto airr = ex("create_airr(1, 35, 0)", i);
      CHECK(airr.as_list().size() == 13);
      for (const auto& s : airr.as_list()) {
        CHECK(s.as_str().size() == 12);
        CHECK(s.as_str().find_first_not_of("ACGT") == std::string::npos);
      }
      const auto p = ex("assign_protocol(1)", i).as_int();
      CHECK((p == 0 || p == 1));
    }
    CHECK_THROWS_AS(ex("sigmoid_binomial(1, 0, \"Q\")"), EvalError);
    const auto kv = ex("encode_kmers([\"ACGT\"])");
    CHECK(ints(kv) == kmers_by_scan({"ACGT"}, 2, "ACGT"));

    // Bars and blocks land where documented.
    const auto img = ex("drawImage(1, 0, 0, 1)").as_tensor();
    CHECK(img.shape == std::vector<std::int64_t>{16, 16});
    CHECK(img.data[8 * 16 + 5] == 1.0);
    CHECK(img.data[12 * 16 + 12] == 0.75);
    CHECK(img.data[0] == 0.0);
    const auto blank = ex("drawImage(0, 0, 0, 0)").as_tensor();
    CHECK(blank.data == std::vector<double>(256, 0.0));
  }
}

#include "dagforge/stdlib.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dagforge/errors.hpp"
#include "dagforge/registry.hpp"

namespace dagforge::stdlib {

namespace {

constexpr std::int64_t kMaxSeqLength = 100'000'000;
constexpr std::size_t kMaxKmerTable = std::size_t{1} << 24;
constexpr double kMaxPoissonLambda = 1e7;

__extension__ using uint128 = unsigned __int128;

/// Maps a raw 64-bit draw onto [0, range) by multiply-high.
std::uint64_t scale_draw(std::uint64_t raw, std::uint64_t range) {
  return static_cast<std::uint64_t>((static_cast<uint128>(raw) * range) >> 64);
}

}  // namespace

double uniform(RandomStream& rng, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("bounds must be finite");
  if (a > b) throw DomainError("lower bound exceeds upper bound");
  const double u = rng.next_double();
  if (a == b) return a;
  return a + (b - a) * u;
}

std::int64_t binomial(RandomStream& rng, std::int64_t n, double p) {
  if (n < 0) throw DomainError("n must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const double u = rng.next_double();
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const double log_odds = std::log(p) - std::log1p(-p);
  double log_pmf = static_cast<double>(n) * std::log1p(-p);
  double cdf = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    cdf += std::exp(log_pmf);
    if (u < cdf) return k;
    log_pmf += std::log(static_cast<double>(n - k) / static_cast<double>(k + 1)) + log_odds;
  }
  return n;
}

std::int64_t randint(RandomStream& rng, std::int64_t lo, std::int64_t hi) {
  if (lo >= hi) throw DomainError("empty range: randint draws from [lo, hi) and needs lo < hi");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  const std::uint64_t offset = scale_draw(rng.next_u64(), range);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + offset);
}

double normal(RandomStream& rng, double mu, double sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma)) throw DomainError("parameters must be finite");
  if (sigma < 0.0) throw DomainError("sigma must be non-negative");
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));  // 1 - u1 is in (0, 1]
  return mu + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t poisson(RandomStream& rng, double lambda) {
  if (!(lambda >= 0.0 && lambda <= kMaxPoissonLambda))
    throw DomainError("lambda must lie in [0, 1e7]");
  const double u = rng.next_double();
  if (lambda == 0.0) return 0;
  const double log_lambda = std::log(lambda);
  const auto limit = static_cast<std::int64_t>(lambda + 50.0 * std::sqrt(lambda) + 100.0);
  double log_pmf = -lambda;
  double cdf = 0.0;
  std::int64_t k = 0;
  for (; k < limit; ++k) {
    cdf += std::exp(log_pmf);
    if (u < cdf) return k;
    log_pmf += log_lambda - std::log(static_cast<double>(k + 1));
  }
  return k;
}

std::int64_t categorical(RandomStream& rng, std::span<const double> probs) {
  if (probs.empty()) throw DomainError("probabilities must be non-empty");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("probabilities must sum to 1");
  const double u = rng.next_double();
  double cdf = 0.0;
  std::int64_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<std::int64_t>(i);
    cdf += probs[i];
    if (u < cdf && probs[i] > 0.0) return static_cast<std::int64_t>(i);
  }
  return last_positive;
}

std::string random_seq(RandomStream& rng, std::string_view alphabet, std::int64_t length) {
  if (alphabet.empty()) throw DomainError("alphabet must be non-empty");
  if (length < 0) throw DomainError("length must be non-negative");
  if (length > kMaxSeqLength) throw DomainError("length exceeds 1e8");
  std::string out;
  out.reserve(static_cast<std::size_t>(length));
  for (std::int64_t i = 0; i < length; ++i)
    out += alphabet[scale_draw(rng.next_u64(), alphabet.size())];
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string implant(std::string_view seq, std::string_view motif, std::int64_t pos) {
  if (pos < 0 || static_cast<std::uint64_t>(pos) + motif.size() > seq.size())
    throw DomainError("motif does not fit at position " + std::to_string(pos));
  std::string out(seq);
  out.replace(static_cast<std::size_t>(pos), motif.size(), motif);
  return out;
}

std::vector<std::int64_t> kmer_counts(std::span<const std::string> seqs, std::int64_t k,
                                      std::string_view alphabet) {
  if (k < 1) throw DomainError("k must be at least 1");
  if (alphabet.empty()) throw DomainError("alphabet must be non-empty");
  std::array<int, 256> rank;
  rank.fill(-1);
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    auto& slot = rank[static_cast<unsigned char>(alphabet[i])];
    if (slot != -1) throw DomainError("alphabet has repeated characters");
    slot = static_cast<int>(i);
  }
  const std::size_t base = alphabet.size();
  std::size_t table = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    if (table > kMaxKmerTable / base) throw DomainError("k-mer table too large");
    table *= base;
  }
  std::vector<std::int64_t> counts(table, 0);
  const auto width = static_cast<std::size_t>(k);
  std::vector<std::size_t> digits;
  for (const auto& s : seqs) {
    digits.clear();
    for (char c : s) {
      const int r = rank[static_cast<unsigned char>(c)];
      if (r < 0) throw DomainError(std::string("character '") + c + "' not in alphabet");
      digits.push_back(static_cast<std::size_t>(r));
    }
    if (digits.size() < width) continue;
    // Rolling base-|alphabet| index of the current window.
    std::size_t index = 0;
    for (std::size_t i = 0; i < width; ++i) index = index * base + digits[i];
    ++counts[index];
    for (std::size_t i = width; i < digits.size(); ++i) {
      index = (index * base + digits[i]) % table;
      ++counts[index];
    }
  }
  return counts;
}

Tensor tensor_zeros(std::span<const std::int64_t> shape) {
  Tensor t;
  t.shape.assign(shape.begin(), shape.end());
  if (t.shape.empty()) throw DomainError("shape must have at least one dimension");
  std::size_t n = 1;
  for (auto d : t.shape) {
    if (d < 1) throw DomainError("dimensions must be positive");
    if (n > (std::size_t{1} << 32) / static_cast<std::size_t>(d)) throw DomainError("tensor too large");
    n *= static_cast<std::size_t>(d);
  }
  t.data.assign(n, 0.0);
  return t;
}

Tensor tensor_fill_rect(const Tensor& t, std::int64_t r0, std::int64_t c0, std::int64_t r1,
                        std::int64_t c1, double v) {
  if (t.rank() != 2) throw DomainError("tensor must be 2-D");
  const std::int64_t rows = t.shape[0];
  const std::int64_t cols = t.shape[1];
  if (!(0 <= r0 && r0 <= r1 && r1 <= rows && 0 <= c0 && c0 <= c1 && c1 <= cols))
    throw DomainError("rectangle out of range");
  Tensor out = t;
  for (std::int64_t r = r0; r < r1; ++r)
    for (std::int64_t c = c0; c < c1; ++c) out.data[static_cast<std::size_t>(r * cols + c)] = v;
  return out;
}

double arg_real(const Value& v, std::string_view name) {
  if (!v.is_numeric())
    throw DomainError(std::string(name) + " must be a number, got " + std::string(type_name(v)));
  return v.to_double();
}

std::int64_t arg_int(const Value& v, std::string_view name) {
  if (!v.is_int())
    throw DomainError(std::string(name) + " must be an int, got " + std::string(type_name(v)));
  return v.as_int();
}

const std::string& arg_str(const Value& v, std::string_view name) {
  if (!v.is_str())
    throw DomainError(std::string(name) + " must be a str, got " + std::string(type_name(v)));
  return v.as_str();
}

const List& arg_list(const Value& v, std::string_view name) {
  if (!v.is_list())
    throw DomainError(std::string(name) + " must be a list, got " + std::string(type_name(v)));
  return v.as_list();
}

std::vector<double> arg_real_list(const Value& v, std::string_view name) {
  std::vector<double> out;
  for (const auto& item : arg_list(v, name)) out.push_back(arg_real(item, name));
  return out;
}

}  // namespace dagforge::stdlib

namespace dagforge {

namespace {

using stdlib::arg_int;
using stdlib::arg_list;
using stdlib::arg_real;
using stdlib::arg_str;

std::int64_t to_int_checked(double x) {
  constexpr double two63 = 9223372036854775808.0;
  if (!(x >= -two63 && x < two63)) throw DomainError("result outside int range");
  return static_cast<std::int64_t>(x);
}

std::size_t index_arg(const Value& v, std::size_t size, std::string_view name) {
  const auto i = arg_int(v, name);
  if (i < 0 || static_cast<std::uint64_t>(i) >= size)
    throw DomainError(std::string(name) + " " + std::to_string(i) + " out of range for length " +
                      std::to_string(size));
  return static_cast<std::size_t>(i);
}

const Value& pick_extreme(std::span<const Value> args, bool want_max) {
  const Value* best = nullptr;
  for (const auto& a : args) {
    const double x = arg_real(a, "argument");
    if (!best || (want_max ? x > best->to_double() : x < best->to_double())) best = &a;
  }
  return *best;
}

struct Builder {
  FunctionRegistry& registry;

  void add(std::string name, Arity arity, bool stochastic, std::string signature,
           std::string summary, Callable impl) {
    FunctionEntry e;
    e.name = std::move(name);
    e.arity = arity;
    e.stochastic = stochastic;
    e.builtin = true;
    e.signature = std::move(signature);
    e.summary = std::move(summary);
    e.impl = std::move(impl);
    registry.register_function(std::move(e));
  }
};

Value real_fn(std::span<const Value> a, double (*f)(double)) { return Value::real(f(arg_real(a[0], "x"))); }

}  // namespace

void register_builtins(FunctionRegistry& registry) {
  Builder b{registry};
  const auto one = Arity::fixed(1);
  const auto two = Arity::fixed(2);
  const auto three = Arity::fixed(3);

  // Distributions.
  b.add("uniform", two, true, "uniform(a: number, b: number) -> float",
        "continuous uniform on [a, b); 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::real(stdlib::uniform(*rng, arg_real(a[0], "a"), arg_real(a[1], "b")));
        });
  b.add("normal", two, true, "normal(mu: number, sigma: number) -> float",
        "Gaussian via Box-Muller; 2 draws",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::real(stdlib::normal(*rng, arg_real(a[0], "mu"), arg_real(a[1], "sigma")));
        });
  b.add("binomial", two, true, "binomial(n: int, p: number) -> int",
        "successes in n Bernoulli(p) trials; 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::integer(stdlib::binomial(*rng, arg_int(a[0], "n"), arg_real(a[1], "p")));
        });
  b.add("bernoulli", one, true, "bernoulli(p: number) -> int", "binomial(1, p); 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::integer(stdlib::binomial(*rng, 1, arg_real(a[0], "p")));
        });
  b.add("randint", two, true, "randint(lo: int, hi: int) -> int",
        "uniform integer in [lo, hi), hi excluded; 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::integer(stdlib::randint(*rng, arg_int(a[0], "lo"), arg_int(a[1], "hi")));
        });
  b.add("poisson", one, true, "poisson(lambda: number) -> int", "Poisson count; 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::integer(stdlib::poisson(*rng, arg_real(a[0], "lambda")));
        });
  b.add("categorical", one, true, "categorical(probs: list) -> int",
        "index drawn with weights probs (sum 1 +- 1e-9); 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          const auto probs = stdlib::arg_real_list(a[0], "probs");
          return Value::integer(stdlib::categorical(*rng, probs));
        });
  b.add("choice", Arity::variadic(1, 2), true, "choice(items: list[, probs: list]) -> value",
        "element of items, uniform or weighted; 1 draw",
        [](std::span<const Value> a, RandomStream* rng) {
          const auto& items = arg_list(a[0], "items");
          if (items.empty()) throw DomainError("items must be non-empty");
          std::vector<double> probs;
          if (a.size() == 2) {
            probs = stdlib::arg_real_list(a[1], "probs");
            if (probs.size() != items.size())
              throw DomainError("items and probs differ in length");
          } else {
            probs.assign(items.size(), 1.0 / static_cast<double>(items.size()));
            // Equal weights may round away from 1; renormalise the last one.
            double head = 0.0;
            for (std::size_t i = 0; i + 1 < probs.size(); ++i) head += probs[i];
            probs.back() = 1.0 - head;
          }
          return items[static_cast<std::size_t>(stdlib::categorical(*rng, probs))];
        });
  b.add("random_seq", two, true, "random_seq(alphabet: str, length: int) -> str",
        "i.i.d. uniform characters from alphabet; length draws",
        [](std::span<const Value> a, RandomStream* rng) {
          return Value::str(
              stdlib::random_seq(*rng, arg_str(a[0], "alphabet"), arg_int(a[1], "length")));
        });

  // Math.
  b.add("sigmoid", one, false, "sigmoid(x: number) -> float", "1 / (1 + exp(-x))",
        [](std::span<const Value> a, RandomStream*) { return real_fn(a, stdlib::sigmoid); });
  b.add("exp", one, false, "exp(x: number) -> float", "e^x",
        [](std::span<const Value> a, RandomStream*) {
          return real_fn(a, [](double x) { return std::exp(x); });
        });
  b.add("log", one, false, "log(x: number) -> float", "natural log; x > 0",
        [](std::span<const Value> a, RandomStream*) {
          const double x = arg_real(a[0], "x");
          if (!(x > 0.0)) throw DomainError("log needs x > 0");
          return Value::real(std::log(x));
        });
  b.add("sqrt", one, false, "sqrt(x: number) -> float", "square root; x >= 0",
        [](std::span<const Value> a, RandomStream*) {
          const double x = arg_real(a[0], "x");
          if (!(x >= 0.0)) throw DomainError("sqrt needs x >= 0");
          return Value::real(std::sqrt(x));
        });
  b.add("pow", two, false, "pow(x: number, y: number) -> float", "x^y; NaN results rejected",
        [](std::span<const Value> a, RandomStream*) {
          const double r = std::pow(arg_real(a[0], "x"), arg_real(a[1], "y"));
          if (std::isnan(r)) throw DomainError("pow result is undefined");
          return Value::real(r);
        });
  b.add("abs", one, false, "abs(x: number) -> number", "absolute value; keeps int/float kind",
        [](std::span<const Value> a, RandomStream*) {
          if (a[0].is_int()) {
            const auto i = a[0].as_int();
            if (i == std::numeric_limits<std::int64_t>::min()) throw DomainError("integer overflow");
            return Value::integer(i < 0 ? -i : i);
          }
          return Value::real(std::abs(arg_real(a[0], "x")));
        });
  b.add("floor", one, false, "floor(x: number) -> int", "largest int <= x",
        [](std::span<const Value> a, RandomStream*) {
          if (a[0].is_int()) return a[0];
          return Value::integer(to_int_checked(std::floor(arg_real(a[0], "x"))));
        });
  b.add("round", one, false, "round(x: number) -> int", "nearest int, halves away from zero",
        [](std::span<const Value> a, RandomStream*) {
          if (a[0].is_int()) return a[0];
          return Value::integer(to_int_checked(std::round(arg_real(a[0], "x"))));
        });
  b.add("min", Arity::variadic(1), false, "min(x, ...) -> number",
        "smallest argument, returned unchanged (first on ties)",
        [](std::span<const Value> a, RandomStream*) { return pick_extreme(a, false); });
  b.add("max", Arity::variadic(1), false, "max(x, ...) -> number",
        "largest argument, returned unchanged (first on ties)",
        [](std::span<const Value> a, RandomStream*) { return pick_extreme(a, true); });
  b.add("clamp", three, false, "clamp(x: number, lo: number, hi: number) -> number",
        "x limited to [lo, hi]; lo <= hi",
        [](std::span<const Value> a, RandomStream*) {
          const double x = arg_real(a[0], "x");
          const double lo = arg_real(a[1], "lo");
          const double hi = arg_real(a[2], "hi");
          if (lo > hi) throw DomainError("lo exceeds hi");
          if (x < lo) return a[1];
          if (x > hi) return a[2];
          return a[0];
        });

  // Sequences and lists.
  b.add("len", one, false, "len(seq: list|str) -> int", "number of elements or bytes",
        [](std::span<const Value> a, RandomStream*) {
          if (a[0].is_str()) return Value::integer(static_cast<std::int64_t>(a[0].as_str().size()));
          return Value::integer(static_cast<std::int64_t>(arg_list(a[0], "seq").size()));
        });
  b.add("get", two, false, "get(seq: list|str, i: int) -> value", "element i (0-based)",
        [](std::span<const Value> a, RandomStream*) {
          if (a[0].is_str()) {
            const auto& s = a[0].as_str();
            return Value::str(std::string(1, s[index_arg(a[1], s.size(), "index")]));
          }
          const auto& items = arg_list(a[0], "seq");
          return items[index_arg(a[1], items.size(), "index")];
        });
  b.add("slice", three, false, "slice(seq: list|str, start: int, end: int) -> list|str",
        "elements [start, end)",
        [](std::span<const Value> a, RandomStream*) {
          const auto start = arg_int(a[1], "start");
          const auto end = arg_int(a[2], "end");
          const std::size_t size = a[0].is_str() ? a[0].as_str().size() : arg_list(a[0], "seq").size();
          if (start < 0 || start > end || static_cast<std::uint64_t>(end) > size)
            throw DomainError("slice bounds out of range");
          const auto s = static_cast<std::size_t>(start);
          const auto e = static_cast<std::size_t>(end);
          if (a[0].is_str()) return Value::str(a[0].as_str().substr(s, e - s));
          const auto& items = a[0].as_list();
          return Value::list(List(items.begin() + static_cast<std::ptrdiff_t>(s),
                                  items.begin() + static_cast<std::ptrdiff_t>(e)));
        });
  b.add("concat", two, false, "concat(a: str|list, b: str|list) -> str|list",
        "joins two strings or two lists",
        [](std::span<const Value> a, RandomStream*) {
          if (a[0].is_str() && a[1].is_str()) return Value::str(a[0].as_str() + a[1].as_str());
          List out = arg_list(a[0], "a");
          const auto& tail = arg_list(a[1], "b");
          out.insert(out.end(), tail.begin(), tail.end());
          return Value::list(std::move(out));
        });
  b.add("str", one, false, "str(x) -> str", "text form of x as written to a CSV cell",
        [](std::span<const Value> a, RandomStream*) { return Value::str(csv_cell(a[0])); });
  b.add("implant", three, false, "implant(seq: str, motif: str, pos: int) -> str",
        "seq with [pos, pos + len(motif)) overwritten by motif",
        [](std::span<const Value> a, RandomStream*) {
          return Value::str(
              stdlib::implant(arg_str(a[0], "seq"), arg_str(a[1], "motif"), arg_int(a[2], "pos")));
        });
  b.add("kmer_counts", three, false, "kmer_counts(seqs: list, k: int, alphabet: str) -> list",
        "overlapping k-mer counts, |alphabet|^k entries in lexicographic k-mer order",
        [](std::span<const Value> a, RandomStream*) {
          std::vector<std::string> seqs;
          for (const auto& s : arg_list(a[0], "seqs")) seqs.push_back(arg_str(s, "sequence"));
          const auto counts =
              stdlib::kmer_counts(seqs, arg_int(a[1], "k"), arg_str(a[2], "alphabet"));
          List out;
          out.reserve(counts.size());
          for (auto c : counts) out.push_back(Value::integer(c));
          return Value::list(std::move(out));
        });

  // Tensors.
  b.add("tensor_zeros", one, false, "tensor_zeros(shape: list) -> tensor",
        "all-zero tensor of the given shape",
        [](std::span<const Value> a, RandomStream*) {
          std::vector<std::int64_t> shape;
          for (const auto& d : arg_list(a[0], "shape")) shape.push_back(arg_int(d, "dimension"));
          return Value::tensor(stdlib::tensor_zeros(shape));
        });
  b.add("tensor_fill_rect", Arity::fixed(6), false,
        "tensor_fill_rect(t: tensor, r0: int, c0: int, r1: int, c1: int, v: number) -> tensor",
        "copy of 2-D t with rows [r0, r1) x cols [c0, c1) set to v",
        [](std::span<const Value> a, RandomStream*) {
          if (!a[0].is_tensor()) throw DomainError("t must be a tensor");
          return Value::tensor(stdlib::tensor_fill_rect(
              a[0].as_tensor(), arg_int(a[1], "r0"), arg_int(a[2], "c0"), arg_int(a[3], "r1"),
              arg_int(a[4], "c1"), arg_real(a[5], "v")));
        });
  b.add("tensor_shape", one, false, "tensor_shape(t: tensor) -> list", "dimensions of t",
        [](std::span<const Value> a, RandomStream*) {
          if (!a[0].is_tensor()) throw DomainError("t must be a tensor");
          List out;
          for (auto d : a[0].as_tensor().shape) out.push_back(Value::integer(d));
          return Value::list(std::move(out));
        });
  b.add("tensor_sum", one, false, "tensor_sum(t: tensor) -> float", "sum of all entries",
        [](std::span<const Value> a, RandomStream*) {
          if (!a[0].is_tensor()) throw DomainError("t must be a tensor");
          double total = 0.0;
          for (double x : a[0].as_tensor().data) total += x;
          return Value::real(total);
        });
}

}  // namespace dagforge

#include "dagforge/example_functions.hpp"

#include "dagforge/errors.hpp"
#include "dagforge/stdlib.hpp"

namespace dagforge {

namespace {

using stdlib::arg_int;
using stdlib::arg_real;

struct SigmoidPreset {
  double bias;
  double weight_c;
  double weight_x;
};

// Indexed by the third argument of sigmoid_binomial.
SigmoidPreset sigmoid_preset(const std::string& label) {
  if (label == "H") return {-1.0, 1.5, 2.0};
  if (label == "V") return {-1.0, 2.0, 1.5};
  throw DomainError("unknown preset '" + label + "' (expected \"H\" or \"V\")");
}

Value draw_image(std::int64_t h, std::int64_t v, std::int64_t r, std::int64_t c) {
  using examples::kImageSize;
  const std::int64_t shape[] = {kImageSize, kImageSize};
  Tensor img = stdlib::tensor_zeros(shape);
  if (h == 1) img = stdlib::tensor_fill_rect(img, 7, 2, 9, 14, 1.0);   // horizontal bar
  if (v == 1) img = stdlib::tensor_fill_rect(img, 2, 7, 14, 9, 1.0);   // vertical bar
  if (r == 1) img = stdlib::tensor_fill_rect(img, 1, 1, 5, 5, 0.5);    // top-left block
  if (c == 1) img = stdlib::tensor_fill_rect(img, 11, 11, 15, 15, 0.75);  // bottom-right block
  return Value::tensor(std::move(img));
}

Value create_airr(RandomStream& rng, std::int64_t disease, std::int64_t age,
                  std::int64_t protocol) {
  if (age < 0) throw DomainError("age must be non-negative");
  const std::int64_t count = 10 + age / 10;
  List repertoire;
  repertoire.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    std::string seq = stdlib::random_seq(rng, examples::kAlphabet, examples::kSequenceLength);
    // Two draws per sequence regardless of the parents, so the stream layout
    // is the same for every patient.
    const double disease_draw = rng.next_double();
    const double protocol_draw = rng.next_double();
    if (disease == 1 && disease_draw < 0.5) seq = stdlib::implant(seq, "CAG", 4);
    if (protocol == 1 && protocol_draw < 0.3) seq = stdlib::implant(seq, "GG", 0);
    repertoire.push_back(Value::str(std::move(seq)));
  }
  return Value::list(std::move(repertoire));
}

}  // namespace

void register_example_functions(FunctionRegistry& registry) {
  register_host_function(
      registry, "complement_binomial", Arity::fixed(1), true,
      [](std::span<const Value> a, RandomStream* rng) {
        return Value::integer(stdlib::binomial(*rng, 1, 1.0 - arg_real(a[0], "p")));
      },
      "binomial(1, 1 - p)");

  register_host_function(
      registry, "sigmoid_binomial", Arity::fixed(3), true,
      [](std::span<const Value> a, RandomStream* rng) {
        const auto preset = sigmoid_preset(stdlib::arg_str(a[2], "preset"));
        const double p = stdlib::sigmoid(preset.bias + preset.weight_c * arg_real(a[0], "c") +
                                         preset.weight_x * arg_real(a[1], "x"));
        return Value::integer(stdlib::binomial(*rng, 1, p));
      },
      "binomial(1, sigmoid(bias + wc*c + wx*x)) with preset coefficients");

  register_host_function(
      registry, "drawImage", Arity::fixed(4), false,
      [](std::span<const Value> a, RandomStream*) {
        return draw_image(arg_int(a[0], "H"), arg_int(a[1], "V"), arg_int(a[2], "R"),
                          arg_int(a[3], "C"));
      },
      "16x16 image with one shape per active indicator");

  register_host_function(
      registry, "assign_protocol", Arity::fixed(1), true,
      [](std::span<const Value> a, RandomStream* rng) {
        const double p = arg_int(a[0], "disease") == 1 ? 0.7 : 0.3;
        return Value::integer(stdlib::binomial(*rng, 1, p));
      },
      "protocol 1 with probability 0.7 for diseased, 0.3 otherwise");

  register_host_function(
      registry, "create_airr", Arity::fixed(3), true,
      [](std::span<const Value> a, RandomStream* rng) {
        return create_airr(*rng, arg_int(a[0], "disease"), arg_int(a[1], "age"),
                           arg_int(a[2], "protocol"));
      },
      "list of 10 + age/10 random 12-mers with disease and protocol motifs");

  register_host_function(
      registry, "encode_kmers", Arity::fixed(1), false,
      [](std::span<const Value> a, RandomStream*) {
        std::vector<std::string> seqs;
        for (const auto& s : stdlib::arg_list(a[0], "repertoire"))
          seqs.push_back(stdlib::arg_str(s, "sequence"));
        List out;
        for (auto c : stdlib::kmer_counts(seqs, examples::kKmerLength, examples::kAlphabet))
          out.push_back(Value::integer(c));
        return Value::list(std::move(out));
      },
      "2-mer counts over ACGT (16 entries)");
}

}  // namespace dagforge

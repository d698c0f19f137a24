#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dagforge/random.hpp"
#include "dagforge/value.hpp"

// C++ entry points of the built-in functions. The DSL-facing wrappers in the
// registry convert arguments and forward here, so host code composing new
// functions gets identical draws. All throw DomainError on bad input.
namespace dagforge::stdlib {

// Distributions. Raw draw counts per call are fixed by the arguments:
// one draw each unless noted.

/// Continuous uniform on [a, b).
double uniform(RandomStream& rng, double a, double b);

/// Successes in n Bernoulli(p) trials, by CDF inversion.
std::int64_t binomial(RandomStream& rng, std::int64_t n, double p);

/// Uniform integer in the half-open range [lo, hi); lo < hi.
std::int64_t randint(RandomStream& rng, std::int64_t lo, std::int64_t hi);

/// Box-Muller; two draws.
double normal(RandomStream& rng, double mu, double sigma);

/// CDF inversion; 0 <= lambda <= 1e7.
std::int64_t poisson(RandomStream& rng, double lambda);

/// Index drawn with the given weights; probs must sum to 1 within 1e-9.
std::int64_t categorical(RandomStream& rng, std::span<const double> probs);

/// `length` draws, one per character.
std::string random_seq(RandomStream& rng, std::string_view alphabet, std::int64_t length);

// Deterministic helpers.

double sigmoid(double x);

std::string implant(std::string_view seq, std::string_view motif, std::int64_t pos);

/// Overlapping k-mer counts summed over `seqs`, indexed by the k-mer's rank in
/// lexicographic order over `alphabet` (alphabet order, not byte order).
std::vector<std::int64_t> kmer_counts(std::span<const std::string> seqs, std::int64_t k,
                                      std::string_view alphabet);

Tensor tensor_zeros(std::span<const std::int64_t> shape);

/// Copy of `t` with rows [r0, r1) and columns [c0, c1) set to `v`.
Tensor tensor_fill_rect(const Tensor& t, std::int64_t r0, std::int64_t c0, std::int64_t r1,
                        std::int64_t c1, double v);

// Argument conversion shared by the DSL wrappers.
double arg_real(const Value& v, std::string_view name);
std::int64_t arg_int(const Value& v, std::string_view name);
const std::string& arg_str(const Value& v, std::string_view name);
const List& arg_list(const Value& v, std::string_view name);
std::vector<double> arg_real_list(const Value& v, std::string_view name);

}  // namespace dagforge::stdlib

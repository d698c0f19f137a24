#pragma once

#include "dagforge/registry.hpp"

namespace dagforge {

/// Host functions used by the bundled models in models/:
///
///   images.yaml  complement_binomial, sigmoid_binomial, drawImage
///   bioseq.yaml  assign_protocol, create_airr, encode_kmers
///
/// Each is composed from stdlib primitives; coefficients are listed in
/// docs/STDLIB.md.
void register_example_functions(FunctionRegistry& registry);

namespace examples {

inline constexpr int kImageSize = 16;
inline constexpr int kSequenceLength = 12;
inline constexpr int kKmerLength = 2;
inline constexpr const char* kAlphabet = "ACGT";

}  // namespace examples

}  // namespace dagforge

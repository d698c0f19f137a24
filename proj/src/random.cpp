#include "dagforge/random.hpp"

namespace dagforge {

namespace {

constexpr std::uint64_t kSampleMul = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kSubstreamMul = 0xAEF17502108EF2D9ULL;

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t sample_index,
                           std::uint64_t substream) noexcept
    : seed_(seed), sample_index_(sample_index), substream_(substream) {
  const std::uint64_t k0 = mix64(seed ^ kGolden);
  const std::uint64_t k1 = mix64(k0 + sample_index * kSampleMul + 1);
  key_ = mix64(k1 ^ (substream * kSubstreamMul + 2));
}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::next_double() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace dagforge

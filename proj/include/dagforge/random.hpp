#pragma once

#include <cstdint>
#include <string_view>

namespace dagforge {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based random stream. Draw number `n` is a pure function of
/// (seed, sample_index, substream, n), so streams for different samples or
/// nodes never interact and can be consumed in any order or in parallel.
///
/// key  = mix64(mix64(mix64(seed ^ G) + sample_index * C1 + 1) ^ (substream * C2 + 2))
/// draw = mix64(key + (n + 1) * G)
///
/// with G = 0x9E3779B97F4A7C15, C1 = 0xD1B54A32D192ED03, C2 = 0xAEF17502108EF2D9.
class RandomStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  RandomStream(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t substream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution; one raw draw.
  double next_double() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t sample_index() const noexcept { return sample_index_; }
  std::uint64_t substream() const noexcept { return substream_; }
  std::uint64_t draw_counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t sample_index_;
  std::uint64_t substream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dagforge

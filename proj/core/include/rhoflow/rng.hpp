#pragma once

#include <cstdint>
#include <random>

namespace rhoflow {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive statistically independent child seeds
/// (per grid point, per purpose) from a single user seed.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Well-known purposes for seed derivation so that unrelated random streams
/// never collide.
namespace seed_stream {
inline constexpr std::uint64_t dequantize = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t init = 3;
inline constexpr std::uint64_t shuffle = 4;
inline constexpr std::uint64_t grid = 5;
inline constexpr std::uint64_t sampling = 6;
}  // namespace seed_stream

/// Standard normal draws from a seeded engine.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }
  Rng& engine() noexcept { return engine_; }

 private:
  Rng engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace rhoflow

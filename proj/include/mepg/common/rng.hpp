#pragma once

#include <cstdint>
#include <random>

namespace mepg {

/// SplitMix64 finalizer; used to derive decorrelated sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded pseudo random source. Copying an Rng copies its state, so two
/// copies produce identical streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix_seed(seed)) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  bool bernoulli(double p_true) {
    return std::bernoulli_distribution(p_true)(engine_);
  }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double canonical() { return double(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next_seed() { return engine_(); }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// The four independent random streams of one training run.
struct RunStreams {
  Rng train;
  Rng env_reset;
  Rng eval;
  Rng dropout;

  explicit RunStreams(std::uint64_t run_seed)
      : train(mix_seed(run_seed * 4 + 0)),
        env_reset(mix_seed(run_seed * 4 + 1)),
        eval(mix_seed(run_seed * 4 + 2)),
        dropout(mix_seed(run_seed * 4 + 3)) {}
};

}  // namespace mepg

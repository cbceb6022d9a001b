#pragma once

#include <cstdint>
#include <random>

namespace excite {

/// Seeded random source with platform-independent draws.
///
/// std::uniform_real_distribution and std::normal_distribution are
/// implementation-defined, so the conversions from raw 64-bit output are done
/// here to keep datasets reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal (Box-Muller, both outputs used).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 mix of (base, index); used to derive independent per-task seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace excite

#pragma once

#include <cstdint>
#include <random>

namespace varnet {

// Derives an independent child seed from a master seed and an index
// (splitmix64 finalizer). Replication r of a Monte Carlo study always uses
// derive_seed(master, r), so serial and partitioned execution agree.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic Gaussian source: std::mt19937_64 stream mapped through an
// explicit Box-Muller transform. Both steps are pinned algorithms, so a
// given seed yields the same draw sequence on every standard library.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

  // Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  double chi_square(double df) { return 2.0 * gamma(df / 2.0); }

  // Student-t rescaled to unit variance; requires nu > 2.
  double scaled_t(double nu);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace varnet

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace procaudit {

// Thin wrapper over mt19937_64 whose derived draws do not depend on the
// standard library's distribution implementations, so a seed produces the
// same stream with any toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  // Standard normal draw (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stage seed = mix(master, FNV-1a(stage), index). Stages can be re-run in
// isolation with the same derived seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::uint64_t index = 0);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace procaudit

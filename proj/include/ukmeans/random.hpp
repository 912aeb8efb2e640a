#ifndef UKMEANS_RANDOM_HPP
#define UKMEANS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace ukm {

/// Seeded generator with a fixed double conversion, so streams are
/// reproducible across standard libraries. `stream` separates independent
/// uses of the same user seed.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }
  /// Independent substream `index` of (seed, stream), e.g. one per object.
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform01_open_low() { return 1.0 - uniform01(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

// Stream tags.
inline constexpr std::uint64_t kStreamDataset = 0x44415441;   // "DATA"
inline constexpr std::uint64_t kStreamInitReps = 0x52455053;  // "REPS"

}  // namespace ukm

#endif  // UKMEANS_RANDOM_HPP

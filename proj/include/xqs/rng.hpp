#pragma once

#include <cstdint>
#include <random>

namespace xqs {

/// Mix a parent seed with a stream index into an independent child seed
/// (splitmix64 finalizer over a Weyl-sequence counter). Used to give every
/// replicate, method and alpha its own stream so that results do not depend
/// on scheduling order.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Seeded random stream. Each thread must own its stream.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw on the open interval (0, 1).
  double uniform() noexcept {
    // 53 random bits, offset by half an ulp so neither endpoint is reachable.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
};

}  // namespace xqs

#pragma once

#include <cstdint>

#include "truchet/scalar.hpp"

namespace truchet {

/// SplitMix64 (Steele, Lea, Flood 2014). Deterministic 64-bit generator,
/// splittable by index so that parallel partitions of a run are independent
/// of the worker count. Identified in reports as kRngName.
inline constexpr const char* kRngName = "splitmix64-v1";

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Child generator for stream element `index`; independent of how the
  /// index range is partitioned across workers.
  SplitMix64 split(std::uint64_t index) const {
    SplitMix64 mixer(state_ ^ (0x9e3779b97f4a7c15ULL * (index + 0x632be59bd9b4e019ULL)));
    return SplitMix64(mixer.next());
  }

  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform dyadic rational in [0, 1) with 53 random bits; exact.
  Scalar unit_scalar() {
    return Scalar(BigInt(next() >> 11), BigInt(1) << 53);
  }

  /// Uniform rational in [0,1) with denominator `den` (1/den grid).
  Scalar grid_scalar(std::uint64_t den) {
    return Scalar(BigInt(below(den)), BigInt(den));
  }

 private:
  std::uint64_t state_;
};

}  // namespace truchet

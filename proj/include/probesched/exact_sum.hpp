#pragma once

#include <array>
#include <cstdint>

namespace probesched {

// Exact accumulator for sums of doubles (a fixed-point "superaccumulator").
//
// Every finite double is representable as an integer multiple of 2^-1074, so
// a wide enough fixed-point register holds any finite sum without rounding.
// Results are rounded once, to nearest-even, when read out. Because the sum is
// exact it does not depend on the order of additions, and because rounding is
// monotone, orderings between exact quantities survive into the doubles.
class ExactSum {
 public:
  ExactSum() { limbs_.fill(0); }

  void add(double x);
  /// Adds the exact product a*b (via an FMA error term).
  void add_product(double a, double b);
  void add(const ExactSum& other);

  /// Correctly rounded value of the sum.
  double value() const;
  /// Correctly rounded value of sum / divisor.
  double divided_by(std::uint64_t divisor) const;

  bool is_zero() const;

 private:
  // Bit 0 of limb 0 has weight 2^kMinExp; each limb carries 32 bits of
  // significance inside an int64 so carries can be deferred.
  static constexpr int kMinExp = -1074 - 64;
  static constexpr int kLimbBits = 32;
  static constexpr int kLimbs = 72;

  void normalize();

  std::array<std::int64_t, kLimbs> limbs_;
  std::uint32_t pending_ = 0;
};

}  // namespace probesched

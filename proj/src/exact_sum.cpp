#include "probesched/exact_sum.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace probesched {

namespace {

using Digits = std::vector<std::uint32_t>;

// Rounds the nonnegative integer `digits` * 2^min_exp (plus a sticky bit for
// anything already discarded below it) to the nearest double, ties to even.
double round_digits(const Digits& digits, bool sticky, int min_exp) {
  int top_digit = static_cast<int>(digits.size()) - 1;
  while (top_digit >= 0 && digits[top_digit] == 0) --top_digit;
  if (top_digit < 0) return 0.0;

  auto bit = [&](long pos) -> std::uint64_t {
    if (pos < 0) return 0;
    return (digits[pos / 32] >> (pos % 32)) & 1u;
  };
  long top = static_cast<long>(top_digit) * 32 + 31;
  while (bit(top) == 0) --top;

  // 53 significant bits plus one rounding bit.
  std::uint64_t sig = 0;
  for (long pos = top; pos >= top - 53; --pos) sig = (sig << 1) | bit(pos);
  long below = top - 54;  // highest position that only feeds the sticky bit
  if (below >= 0) {
    for (long d = below / 32; d >= 0 && !sticky; --d) {
      std::uint32_t word = digits[d];
      if (d == below / 32) {
        int keep = static_cast<int>(below % 32) + 1;
        word = keep == 32 ? word : (word & ((1u << keep) - 1u));
      }
      sticky = word != 0;
    }
  }
  std::uint64_t mant = sig >> 1;
  bool round_bit = (sig & 1u) != 0;
  if (round_bit && (sticky || (mant & 1u))) ++mant;
  long exponent = top - 52;
  if (mant == (std::uint64_t{1} << 53)) {
    mant >>= 1;
    ++exponent;
  }
  return std::ldexp(static_cast<double>(mant), static_cast<int>(exponent + min_exp));
}

}  // namespace

void ExactSum::add(double x) {
  if (x == 0.0) return;
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const std::int64_t sign = (bits >> 63) ? -1 : 1;
  const auto biased = static_cast<int>((bits >> 52) & 0x7ff);
  std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
  int exp = -1074;  // subnormal: mant * 2^-1074
  if (biased != 0) {
    mant |= std::uint64_t{1} << 52;
    exp = biased - 1075;
  }
  const int pos = exp - kMinExp;
  const int limb = pos / kLimbBits;
  auto magnitude = static_cast<unsigned __int128>(mant) << (pos % kLimbBits);
  for (int i = 0; i < 3 && magnitude != 0; ++i) {
    limbs_[limb + i] += sign * static_cast<std::int64_t>(magnitude & 0xffffffffu);
    magnitude >>= kLimbBits;
  }
  if (++pending_ >= (1u << 29)) normalize();
}

void ExactSum::add_product(double a, double b) {
  double hi = a * b;
  double lo = std::fma(a, b, -hi);
  add(hi);
  add(lo);
}

void ExactSum::add(const ExactSum& other) {
  ExactSum rhs = other;
  rhs.normalize();
  normalize();
  for (int i = 0; i < kLimbs; ++i) limbs_[i] += rhs.limbs_[i];
  normalize();
}

void ExactSum::normalize() {
  for (int i = 0; i + 1 < kLimbs; ++i) {
    std::int64_t carry = limbs_[i] >> kLimbBits;  // floor division
    limbs_[i] -= carry * (std::int64_t{1} << kLimbBits);
    limbs_[i + 1] += carry;
  }
  pending_ = 0;
}

bool ExactSum::is_zero() const {
  ExactSum copy = *this;
  copy.normalize();
  for (auto limb : copy.limbs_)
    if (limb != 0) return false;
  return true;
}

namespace {

// Splits a normalized accumulator into sign and magnitude digits.
bool magnitude_of(std::array<std::int64_t, 72> limbs, Digits& out) {
  bool negative = limbs.back() < 0;
  if (negative) {
    for (auto& limb : limbs) limb = -limb;
    for (std::size_t i = 0; i + 1 < limbs.size(); ++i) {
      std::int64_t carry = limbs[i] >> 32;
      limbs[i] -= carry * (std::int64_t{1} << 32);
      limbs[i + 1] += carry;
    }
  }
  out.resize(limbs.size());
  for (std::size_t i = 0; i < limbs.size(); ++i) out[i] = static_cast<std::uint32_t>(limbs[i]);
  return negative;
}

}  // namespace

double ExactSum::value() const {
  ExactSum copy = *this;
  copy.normalize();
  Digits digits;
  bool negative = magnitude_of(copy.limbs_, digits);
  double v = round_digits(digits, false, kMinExp);
  return negative ? -v : v;
}

double ExactSum::divided_by(std::uint64_t divisor) const {
  ExactSum copy = *this;
  copy.normalize();
  Digits digits;
  bool negative = magnitude_of(copy.limbs_, digits);
  Digits quotient(digits.size(), 0);
  unsigned __int128 rem = 0;
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    unsigned __int128 cur = (rem << 32) | digits[i];
    quotient[i] = static_cast<std::uint32_t>(cur / divisor);
    rem = cur % divisor;
  }
  double v = round_digits(quotient, rem != 0, kMinExp);
  return negative ? -v : v;
}

}  // namespace probesched

#pragma once

#include <cstdint>

namespace rnsim {

using u128 = unsigned __int128;
using i128 = __int128;

namespace detail {

/// High 128 bits of a 128x128 -> 256 bit product.
constexpr u128 mul_high_u128(u128 lhs, u128 rhs) {
  const auto a = static_cast<uint64_t>(lhs >> 64);
  const auto b = static_cast<uint64_t>(lhs);
  const auto c = static_cast<uint64_t>(rhs >> 64);
  const auto d = static_cast<uint64_t>(rhs);
  const u128 ac = static_cast<u128>(a) * c;
  const u128 ad = static_cast<u128>(a) * d;
  const u128 bc = static_cast<u128>(b) * c;
  const u128 bd = static_cast<u128>(b) * d;
  const u128 carry = static_cast<u128>(static_cast<uint64_t>(ad)) +
                     static_cast<u128>(static_cast<uint64_t>(bc)) + (bd >> 64);
  return ac + (ad >> 64) + (bc >> 64) + (carry >> 64);
}

}  // namespace detail

/// Barrett reduction against a fixed modulus: n mod m via two multiplications
/// instead of a hardware divide. Valid for any m >= 2 and any 128-bit n.
/// The naive remainder operator stays available in rnsim::ref as the oracle.
class BarrettReducer {
 public:
  BarrettReducer() = default;

  explicit BarrettReducer(uint64_t m)
      : m_(m), inv_(~static_cast<u128>(0) / m + 1) {}

  uint64_t modulus() const { return m_; }

  uint64_t reduce(u128 n) const {
    const u128 approx = static_cast<u128>(m_) * detail::mul_high_u128(n, inv_);
    n += (n < approx) ? m_ : 0;
    return static_cast<uint64_t>(n - approx);
  }

  /// (a * b) mod m.
  uint64_t mul(uint64_t a, uint64_t b) const {
    return reduce(static_cast<u128>(a) * b);
  }

 private:
  uint64_t m_ = 0;
  u128 inv_ = 0;
};

/// Shoup modular multiplication by a fixed multiplicand w < m < 2^63:
/// (a * w) mod m with one widening multiply and two wrapping ones. Used on
/// hot paths where the multiplicand is a precomputed CRT constant.
class ShoupMultiplier {
 public:
  ShoupMultiplier() = default;

  ShoupMultiplier(uint64_t w, uint64_t m)
      : w_(w), m_(m),
        w_shoup_(static_cast<uint64_t>((static_cast<u128>(w) << 64) / m)) {}

  uint64_t multiplicand() const { return w_; }

  /// Requires a < 2^64 (any uint64_t); result in [0, m).
  uint64_t mul(uint64_t a) const {
    const auto q = static_cast<uint64_t>((static_cast<u128>(a) * w_shoup_) >> 64);
    uint64_t r = a * w_ - q * m_;  // wrapping; true value is in [0, 2m)
    if (r >= m_) r -= m_;
    return r;
  }

 private:
  uint64_t w_ = 0;
  uint64_t m_ = 0;
  uint64_t w_shoup_ = 0;
};

}  // namespace rnsim

#include "rnsim/rns.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace rnsim {

namespace {

constexpr uint64_t kMaxModulus = 0xFFFFFFFFull;       // residues fit in 32 bits
constexpr u128 kMaxProduct = (static_cast<u128>(1) << 63) - 1;

// Modular inverse of a mod m via extended Euclid; requires gcd(a, m) == 1.
uint64_t mod_inverse(uint64_t a, uint64_t m) {
  int64_t t = 0, new_t = 1;
  auto r = static_cast<int64_t>(m);
  auto new_r = static_cast<int64_t>(a % m);
  while (new_r != 0) {
    const int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (r != 1) {
    throw Error("modular inverse does not exist for " + std::to_string(a) +
                " mod " + std::to_string(m));
  }
  if (t < 0) t += static_cast<int64_t>(m);
  return static_cast<uint64_t>(t);
}

uint32_t reduce_signed(int64_t value, uint64_t m) {
  int64_t r = value % static_cast<int64_t>(m);
  if (r < 0) r += static_cast<int64_t>(m);
  return static_cast<uint32_t>(r);
}

}  // namespace

SignedRange signed_range_for(uint64_t range) {
  const auto half = static_cast<int64_t>((range - 1) / 2);
  return SignedRange{-half, half};
}

ModuliSet ModuliSet::make(std::vector<uint64_t> moduli) {
  if (moduli.empty()) {
    throw ConfigError("moduli list must not be empty");
  }
  for (uint64_t m : moduli) {
    if (m < 2) {
      throw ConfigError("modulus must be >= 2, got " + std::to_string(m));
    }
    if (m > kMaxModulus) {
      throw OverflowError("modulus " + std::to_string(m) + " exceeds 32 bits");
    }
  }
  for (size_t i = 0; i < moduli.size(); ++i) {
    for (size_t j = i + 1; j < moduli.size(); ++j) {
      const uint64_t g = std::gcd(moduli[i], moduli[j]);
      if (g != 1) {
        throw NotCoprimeError(moduli[i], moduli[j], g);
      }
    }
  }

  u128 product = 1;
  for (uint64_t m : moduli) {
    product *= m;
    if (product > kMaxProduct) {
      throw OverflowError("moduli product exceeds 2^63 - 1");
    }
  }

  ModuliSet ms;
  ms.moduli_ = std::move(moduli);
  ms.product_ = static_cast<uint64_t>(product);
  ms.product_reducer_ = BarrettReducer(ms.product_);
  ms.crt_weights_.reserve(ms.moduli_.size());
  ms.reducers_.reserve(ms.moduli_.size());
  int width = 0;
  for (uint64_t m : ms.moduli_) {
    const uint64_t big = ms.product_ / m;
    const uint64_t inv = mod_inverse(big % m, m);
    if ((static_cast<u128>(big % m) * inv) % m != 1) {
      throw Error("CRT constant check failed for modulus " + std::to_string(m));
    }
    ms.crt_weights_.push_back(CrtWeight{big, inv});
    ms.crt_mul_.emplace_back(
        static_cast<uint64_t>(static_cast<u128>(big) * inv % ms.product_),
        ms.product_);
    ms.reducers_.emplace_back(m);
    width = std::max(width, static_cast<int>(std::bit_width(m - 1)));
  }
  ms.bit_width_ = width;
  return ms;
}

std::vector<uint32_t> forward_convert(int64_t value, const ModuliSet& ms) {
  if (!ms.signed_range().contains(value)) {
    throw OutOfRangeError("value " + std::to_string(value) +
                          " outside signed range of M = " +
                          std::to_string(ms.product()));
  }
  std::vector<uint32_t> residues(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    residues[i] = reduce_signed(value, ms.modulus(i));
  }
  return residues;
}

uint64_t crt_reconstruct(std::span<const uint32_t> residues, const ModuliSet& ms) {
  if (residues.size() != ms.size()) {
    throw DimensionMismatchError("expected " + std::to_string(ms.size()) +
                                 " residues, got " + std::to_string(residues.size()));
  }
  const uint64_t m_total = ms.product();
  uint64_t acc = 0;
  for (size_t i = 0; i < ms.size(); ++i) {
    if (residues[i] >= ms.modulus(i)) {
      throw InvalidResidueError("residue " + std::to_string(residues[i]) +
                                " not reduced modulo " +
                                std::to_string(ms.modulus(i)));
    }
    // |a_i * M_i * T_i|_M via the precomputed Shoup constant for |M_i T_i|_M.
    acc += ms.crt_multipliers()[i].mul(residues[i]);
    if (acc >= m_total) acc -= m_total;  // terms stay below M < 2^63
  }
  return acc;
}

int64_t signed_decode(uint64_t value, uint64_t range) {
  if (value <= (range - 1) / 2) {
    return static_cast<int64_t>(value);
  }
  return static_cast<int64_t>(value) - static_cast<int64_t>(range);
}

int64_t signed_decode(uint64_t value, const ModuliSet& ms) {
  return signed_decode(value, ms.product());
}

ResidueVector::ResidueVector(ModuliSet ms, size_t length)
    : ms_(std::move(ms)), length_(length),
      channels_(ms_.size(), std::vector<uint32_t>(length, 0)) {}

template <typename T>
static ResidueVector encode_impl(std::span<const T> values, const ModuliSet& ms) {
  ResidueVector rv(ms, values.size());
  const SignedRange range = ms.signed_range();
  for (const T v : values) {
    if (!range.contains(static_cast<int64_t>(v))) {
      throw OutOfRangeError("value " + std::to_string(v) +
                            " outside signed range of M = " +
                            std::to_string(ms.product()));
    }
  }
  for (size_t i = 0; i < ms.size(); ++i) {
    const uint64_t m = ms.modulus(i);
    auto chan = rv.channel(i);
    for (size_t j = 0; j < values.size(); ++j) {
      chan[j] = reduce_signed(static_cast<int64_t>(values[j]), m);
    }
  }
  return rv;
}

ResidueVector ResidueVector::encode(std::span<const int64_t> values,
                                    const ModuliSet& ms) {
  return encode_impl(values, ms);
}

ResidueVector ResidueVector::encode(std::span<const int32_t> values,
                                    const ModuliSet& ms) {
  return encode_impl(values, ms);
}

std::vector<uint32_t> ResidueVector::element(size_t j) const {
  std::vector<uint32_t> out(ms_.size());
  for (size_t i = 0; i < ms_.size(); ++i) {
    out[i] = channels_[i][j];
  }
  return out;
}

std::vector<int64_t> ResidueVector::decode_signed() const {
  std::vector<int64_t> out(length_);
  std::vector<uint32_t> elem(ms_.size());
  for (size_t j = 0; j < length_; ++j) {
    for (size_t i = 0; i < ms_.size(); ++i) {
      elem[i] = channels_[i][j];
    }
    out[j] = rnsim::signed_decode(crt_reconstruct(elem, ms_), ms_);
  }
  return out;
}

std::vector<uint32_t> residue_dot_product(const ResidueVector& a,
                                          const ResidueVector& b) {
  if (!(a.moduli() == b.moduli())) {
    throw ModuliMismatchError("residue vectors use different moduli sets");
  }
  if (a.length() != b.length()) {
    throw DimensionMismatchError("dot product lengths differ: " +
                                 std::to_string(a.length()) + " vs " +
                                 std::to_string(b.length()));
  }
  const ModuliSet& ms = a.moduli();
  std::vector<uint32_t> out(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    const auto lhs = a.channel(i);
    const auto rhs = b.channel(i);
    // Products stay below 2^64 (moduli are < 2^32); the 128-bit accumulator
    // cannot overflow for any realistic vector length.
    u128 acc = 0;
    for (size_t j = 0; j < lhs.size(); ++j) {
      acc += static_cast<uint64_t>(lhs[j]) * static_cast<uint64_t>(rhs[j]);
    }
    out[i] = static_cast<uint32_t>(ms.reducer(i).reduce(acc));
  }
  return out;
}

int required_output_bits(int b_in, int b_w, int64_t h) {
  if (b_in < 1 || b_w < 1 || h < 1) {
    throw ConfigError("required_output_bits needs b_in, b_w, h >= 1");
  }
  const int ceil_log2_h = std::bit_width(static_cast<uint64_t>(h - 1));
  return b_in + b_w + ceil_log2_h - 1;
}

bool covers_output_range(const ModuliSet& ms, int b_in, int b_w, int64_t h) {
  const int b_out = required_output_bits(b_in, b_w, h);
  if (b_out >= 63) return false;
  return ms.product() >= (1ull << b_out);
}

const std::vector<std::pair<std::string, std::vector<uint64_t>>>& moduli_presets() {
  static const std::vector<std::pair<std::string, std::vector<uint64_t>>> presets = {
      {"rns4", {15, 14, 13, 11}},
      {"rns5", {31, 29, 28, 27}},
      {"rns6", {63, 62, 61, 59}},
      {"rns7", {127, 126, 125}},
      {"rns8", {255, 254, 253}},
  };
  return presets;
}

std::vector<uint64_t> preset_moduli(std::string_view name) {
  for (const auto& [preset, moduli] : moduli_presets()) {
    if (preset == name) return moduli;
  }
  throw ConfigError("unknown moduli preset: " + std::string(name));
}

std::string preset_for_bits(int bits) {
  if (bits < 4 || bits > 8) {
    throw ConfigError("no moduli preset for " + std::to_string(bits) + " bits");
  }
  return "rns" + std::to_string(bits);
}

}  // namespace rnsim

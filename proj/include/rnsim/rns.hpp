#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rnsim/barrett.hpp"
#include "rnsim/errors.hpp"

namespace rnsim {

/// Signed integers representable under a dynamic range M:
/// [-floor((M-1)/2), +floor((M-1)/2)], symmetric around zero.
struct SignedRange {
  int64_t lo = 0;
  int64_t hi = 0;

  bool contains(int64_t v) const { return v >= lo && v <= hi; }
};

SignedRange signed_range_for(uint64_t range);

/// CRT reconstruction constants for one modulus m_i:
/// big_mod = M / m_i and inverse = (M / m_i)^-1 mod m_i.
struct CrtWeight {
  uint64_t big_mod;
  uint64_t inverse;
};

/// An ordered set of pairwise co-prime moduli with precomputed CRT constants
/// and Barrett reducers. Immutable after construction; safe to share across
/// threads. Products are tracked in 128-bit arithmetic and capped at 2^63 - 1.
class ModuliSet {
 public:
  static ModuliSet make(std::vector<uint64_t> moduli);

  const std::vector<uint64_t>& moduli() const { return moduli_; }
  size_t size() const { return moduli_.size(); }
  uint64_t modulus(size_t i) const { return moduli_[i]; }

  /// M = product of all moduli.
  uint64_t product() const { return product_; }

  /// max over i of ceil(log2(m_i)); the converter precision the set needs.
  int bit_width() const { return bit_width_; }

  std::span<const CrtWeight> crt_weights() const { return crt_weights_; }

  /// Shoup multipliers for the combined constants |M_i T_i|_M.
  std::span<const ShoupMultiplier> crt_multipliers() const { return crt_mul_; }

  const BarrettReducer& reducer(size_t i) const { return reducers_[i]; }
  const BarrettReducer& product_reducer() const { return product_reducer_; }

  SignedRange signed_range() const { return signed_range_for(product_); }

  bool operator==(const ModuliSet& other) const {
    return moduli_ == other.moduli_;
  }

 private:
  ModuliSet() = default;

  std::vector<uint64_t> moduli_;
  uint64_t product_ = 0;
  int bit_width_ = 0;
  std::vector<CrtWeight> crt_weights_;
  std::vector<ShoupMultiplier> crt_mul_;
  std::vector<BarrettReducer> reducers_;
  BarrettReducer product_reducer_;
};

inline ModuliSet make_moduli_set(std::vector<uint64_t> moduli) {
  return ModuliSet::make(std::move(moduli));
}

/// Residues of a signed scalar against every modulus, using the complement
/// mapping for negatives (v < 0 encodes as v + M, reduced per modulus).
/// Throws OutOfRangeError when |value| exceeds the signed range.
std::vector<uint32_t> forward_convert(int64_t value, const ModuliSet& ms);

/// Unique value in [0, M) congruent to the given residues (CRT).
/// Throws InvalidResidueError on unreduced residues.
uint64_t crt_reconstruct(std::span<const uint32_t> residues, const ModuliSet& ms);

/// Maps a value in [0, range) to the symmetric signed representation:
/// v <= floor((range-1)/2) stays, everything above decodes as v - range.
int64_t signed_decode(uint64_t value, uint64_t range);
int64_t signed_decode(uint64_t value, const ModuliSet& ms);

/// Integer vectors encoded per modulus ("channels"). Channel i holds the
/// residues of every element against modulus m_i, each in [0, m_i).
class ResidueVector {
 public:
  ResidueVector(ModuliSet ms, size_t length);

  static ResidueVector encode(std::span<const int64_t> values, const ModuliSet& ms);
  static ResidueVector encode(std::span<const int32_t> values, const ModuliSet& ms);

  const ModuliSet& moduli() const { return ms_; }
  size_t length() const { return length_; }

  std::span<uint32_t> channel(size_t i) { return channels_[i]; }
  std::span<const uint32_t> channel(size_t i) const { return channels_[i]; }

  /// Residues of element j across all moduli.
  std::vector<uint32_t> element(size_t j) const;

  /// CRT + signed mapping per element.
  std::vector<int64_t> decode_signed() const;

 private:
  ModuliSet ms_;
  size_t length_;
  std::vector<std::vector<uint32_t>> channels_;
};

/// Exact modular dot product: for each modulus i returns
/// |sum_j a_i[j] * b_i[j]|_{m_i}. No information loss.
std::vector<uint32_t> residue_dot_product(const ResidueVector& a,
                                          const ResidueVector& b);

/// Bits needed to capture a full dot product of two h-element vectors with
/// b_in-bit and b_w-bit signed operands: b_in + b_w + ceil(log2 h) - 1.
int required_output_bits(int b_in, int b_w, int64_t h);

/// Companion predicate: log2(M) >= required_output_bits(b_in, b_w, h).
bool covers_output_range(const ModuliSet& ms, int b_in, int b_w, int64_t h);

/// Named moduli sets, one per converter bit width b in {4..8}.
const std::vector<std::pair<std::string, std::vector<uint64_t>>>& moduli_presets();
std::vector<uint64_t> preset_moduli(std::string_view name);
std::string preset_for_bits(int bits);

}  // namespace rnsim

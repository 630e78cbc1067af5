#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rnsim/quantize.hpp"
#include "rnsim/rng.hpp"
#include "rnsim/rns.hpp"

namespace rnsim {

enum class CoreMode { rns, fixed_point };

/// Error model for analog output residues: with probability p each output
/// residue is independently replaced by a uniform draw over the other
/// m_i - 1 values. Deterministic for a given seed and stream key.
struct NoiseModel {
  enum class Kind { replace_uniform };

  double p = 0.0;
  uint64_t seed = 0;
  Kind kind = Kind::replace_uniform;
};

/// One simulated analog tile engine: h x h multiply-accumulate units plus the
/// data converters around them.
///
/// rns mode: one MVM unit per modulus, analog modulo on the outputs, and
/// converters at the moduli bit width (lossless by construction).
/// fixed_point mode: a single unit whose ADC keeps only the top b_adc of
/// b_out output bits.
struct CoreConfig {
  CoreMode mode = CoreMode::fixed_point;
  int h = 0;
  int b_in = 0;
  int b_w = 0;
  int b_dac = 0;
  int b_adc = 0;
  std::optional<ModuliSet> moduli;  // rns mode only

  static CoreConfig rns(ModuliSet ms, int h, int b_in, int b_w);
  static CoreConfig fixed_point(int h, int b_in, int b_w, int b_adc);

  /// Preset rns core for a bit width: b = b_in = b_w with the named moduli set.
  static CoreConfig rns_preset(int bits, int h);

  int output_bits() const { return required_output_bits(b_in, b_w, h); }
};

/// RNS tile MVM: per modulus i, output k is |sum_j W_i[k][j] * x_i[j]|_{m_i},
/// then corrupted per the noise model. ADC capture is lossless since
/// ceil(log2 m_i) <= b_adc. tile_key selects the noise substream so that
/// parallel and serial tile schedules agree bit for bit.
ResidueVector rns_tile_mvm(const QuantizedMatrix& wq, const QuantizedVector& xq,
                           const CoreConfig& cfg, const NoiseModel& noise,
                           uint64_t tile_key = 0);

/// Fixed-point tile MVM result: top-b_adc-bit outputs plus the shift that
/// restores their magnitude (b_out - b_adc dropped low-order bits).
struct TruncatedMvm {
  std::vector<int64_t> values;
  int shift = 0;
};

/// Exact signed dot product per row, then floor division by 2^shift
/// (arithmetic right shift): the ADC reads only the MSBs.
TruncatedMvm fixed_point_tile_mvm(const QuantizedMatrix& wq,
                                  const QuantizedVector& xq,
                                  const CoreConfig& cfg);

/// Applies the noise model to every residue in place. Stream is derived from
/// (noise.seed, stream_key, modulus index); elements are corrupted in order.
void inject_residue_noise(ResidueVector& rv, const NoiseModel& noise,
                          uint64_t stream_key = 0);

/// Same corruption process for a single codeword (one residue per modulus),
/// drawing from an explicit generator.
void corrupt_codeword(std::span<uint32_t> residues, const ModuliSet& ms,
                      double p, Rng& rng);

}  // namespace rnsim

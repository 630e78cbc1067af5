#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rnsim/errors.hpp"
#include "rnsim/matrix.hpp"

namespace rnsim {

// Scale-and-quantize to symmetric signed integers in
// [-(2^(b-1) - 1), 2^(b-1) - 1]; -2^(b-1) is never produced. Inputs use one
// scale factor per vector, weights one per matrix row, so a h x h tile needs
// h + 1 floating-point scales in total.

/// Largest quantized magnitude at b bits.
constexpr int32_t quant_limit(int bits) { return (1 << (bits - 1)) - 1; }

struct QuantizedVector {
  std::vector<int32_t> values;
  int bits = 0;
  double scale = 1.0;

  size_t size() const { return values.size(); }
};

struct QuantizedMatrix {
  std::vector<int32_t> values;  // row-major
  size_t rows = 0;
  size_t cols = 0;
  int bits = 0;
  std::vector<double> row_scales;

  int32_t at(size_t r, size_t c) const { return values[r * cols + c]; }
};

/// scale = max(|x|) (1.0 for an all-zero vector); values = round(x / scale * Q)
/// with round-half-away-from-zero. Throws NonFiniteError on NaN/inf input.
QuantizedVector quantize_input(std::span<const double> x, int bits);

/// Per-row variant of quantize_input over an arbitrary rows x cols matrix.
QuantizedMatrix quantize_weights(const Matrix& w, int bits);

/// Maps integer MVM outputs back to the real scale:
/// y[k] * 2^shift * s_inp * s_w[k] / (Q_in * Q_w). The shift restores bits a
/// truncating ADC dropped; exact cores pass shift = 0.
std::vector<double> dequantize_output(std::span<const int64_t> y_si, double s_inp,
                                      std::span<const double> s_w, int b_in,
                                      int b_w, int shift = 0);

}  // namespace rnsim

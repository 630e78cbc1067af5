#include "rnsim/quantize.hpp"

#include <cmath>
#include <string>

namespace rnsim {

namespace {

void check_bits(int bits) {
  if (bits < 2 || bits > 24) {
    throw ConfigError("quantization bits must be in [2, 24], got " +
                      std::to_string(bits));
  }
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NonFiniteError("non-finite value in quantizer input");
    }
    m = std::max(m, std::fabs(v));
  }
  return m;
}

int32_t round_half_away(double v) {
  return static_cast<int32_t>(v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5));
}

}  // namespace

QuantizedVector quantize_input(std::span<const double> x, int bits) {
  check_bits(bits);
  if (x.empty()) {
    throw DimensionMismatchError("quantize_input needs a non-empty vector");
  }
  QuantizedVector q;
  q.bits = bits;
  const double m = max_abs(x);
  q.scale = m > 0.0 ? m : 1.0;  // all-zero input quantizes exactly with scale 1
  const double gain = quant_limit(bits) / q.scale;
  q.values.resize(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    q.values[j] = round_half_away(x[j] * gain);
  }
  return q;
}

QuantizedMatrix quantize_weights(const Matrix& w, int bits) {
  check_bits(bits);
  QuantizedMatrix q;
  q.rows = w.rows;
  q.cols = w.cols;
  q.bits = bits;
  q.values.resize(w.rows * w.cols);
  q.row_scales.resize(w.rows);
  for (size_t r = 0; r < w.rows; ++r) {
    const std::span<const double> row(w.row(r), w.cols);
    const double m = max_abs(row);
    q.row_scales[r] = m > 0.0 ? m : 1.0;
    const double gain = quant_limit(bits) / q.row_scales[r];
    for (size_t c = 0; c < w.cols; ++c) {
      q.values[r * w.cols + c] = round_half_away(row[c] * gain);
    }
  }
  return q;
}

std::vector<double> dequantize_output(std::span<const int64_t> y_si, double s_inp,
                                      std::span<const double> s_w, int b_in,
                                      int b_w, int shift) {
  if (y_si.size() != s_w.size()) {
    throw DimensionMismatchError("dequantize_output: " + std::to_string(y_si.size()) +
                                 " outputs vs " + std::to_string(s_w.size()) +
                                 " row scales");
  }
  const double step = std::ldexp(1.0, shift) /
                      (static_cast<double>(quant_limit(b_in)) * quant_limit(b_w));
  std::vector<double> out(y_si.size());
  for (size_t k = 0; k < y_si.size(); ++k) {
    out[k] = static_cast<double>(y_si[k]) * step * s_inp * s_w[k];
  }
  return out;
}

}  // namespace rnsim

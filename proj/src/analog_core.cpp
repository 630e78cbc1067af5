#include "rnsim/analog_core.hpp"

#include <string>

#include "rnsim/stream_keys.hpp"

namespace rnsim {

namespace {

void check_dims(const QuantizedMatrix& wq, const QuantizedVector& xq,
                const CoreConfig& cfg) {
  const auto h = static_cast<size_t>(cfg.h);
  if (wq.rows != h || wq.cols != h || xq.size() != h) {
    throw DimensionMismatchError(
        "tile MVM expects " + std::to_string(cfg.h) + "x" + std::to_string(cfg.h) +
        " weights and a " + std::to_string(cfg.h) + "-element input");
  }
  if (wq.bits != cfg.b_w || xq.bits != cfg.b_in) {
    throw ConfigError("quantized operand bit widths do not match the core config");
  }
}

uint32_t reduce_signed32(int32_t value, uint64_t m) {
  int64_t r = value % static_cast<int64_t>(m);
  if (r < 0) r += static_cast<int64_t>(m);
  return static_cast<uint32_t>(r);
}

}  // namespace

CoreConfig CoreConfig::rns(ModuliSet ms, int h, int b_in, int b_w) {
  if (h < 1) throw ConfigError("tile size h must be >= 1");
  if (ms.bit_width() > 16) {
    throw ConfigError("rns core supports moduli up to 16 bits");
  }
  if (!covers_output_range(ms, b_in, b_w, h)) {
    throw RangeViolationError(
        "moduli product " + std::to_string(ms.product()) + " cannot hold a " +
        std::to_string(required_output_bits(b_in, b_w, h)) + "-bit output");
  }
  CoreConfig cfg;
  cfg.mode = CoreMode::rns;
  cfg.h = h;
  cfg.b_in = b_in;
  cfg.b_w = b_w;
  cfg.b_dac = ms.bit_width();
  cfg.b_adc = ms.bit_width();
  cfg.moduli = std::move(ms);
  return cfg;
}

CoreConfig CoreConfig::fixed_point(int h, int b_in, int b_w, int b_adc) {
  if (h < 1) throw ConfigError("tile size h must be >= 1");
  const int b_out = required_output_bits(b_in, b_w, h);
  if (b_adc < 1 || b_adc > b_out) {
    throw ConfigError("fixed-point core needs 1 <= b_adc <= b_out = " +
                      std::to_string(b_out));
  }
  if (b_out > 62) {
    throw OverflowError("fixed-point output width " + std::to_string(b_out) +
                        " exceeds 62 bits");
  }
  CoreConfig cfg;
  cfg.mode = CoreMode::fixed_point;
  cfg.h = h;
  cfg.b_in = b_in;
  cfg.b_w = b_w;
  cfg.b_dac = std::max(b_in, b_w);
  cfg.b_adc = b_adc;
  return cfg;
}

CoreConfig CoreConfig::rns_preset(int bits, int h) {
  return rns(make_moduli_set(preset_moduli(preset_for_bits(bits))), h, bits, bits);
}

ResidueVector rns_tile_mvm(const QuantizedMatrix& wq, const QuantizedVector& xq,
                           const CoreConfig& cfg, const NoiseModel& noise,
                           uint64_t tile_key) {
  if (cfg.mode != CoreMode::rns || !cfg.moduli) {
    throw ConfigError("rns_tile_mvm requires an rns-mode core config");
  }
  check_dims(wq, xq, cfg);
  const ModuliSet& ms = *cfg.moduli;
  const size_t h = xq.size();
  ResidueVector out(ms, h);

  // Each modulus is an independent MVM unit. Moduli are capped at 16 bits, so
  // a 64-bit accumulator holds any realistic tile without intermediate
  // reduction; one Barrett reduction per output implements the analog modulo.
#ifdef _OPENMP
#pragma omp parallel for if (ms.size() > 1)
#endif
  for (int64_t i = 0; i < static_cast<int64_t>(ms.size()); ++i) {
    const uint64_t m = ms.modulus(i);
    const BarrettReducer& red = ms.reducer(i);
    std::vector<uint32_t> x_res(h);
    for (size_t j = 0; j < h; ++j) {
      x_res[j] = reduce_signed32(xq.values[j], m);
    }
    auto chan = out.channel(i);
    for (size_t k = 0; k < h; ++k) {
      uint64_t acc = 0;
      const int32_t* w_row = wq.values.data() + k * h;
      for (size_t j = 0; j < h; ++j) {
        acc += static_cast<uint64_t>(reduce_signed32(w_row[j], m)) * x_res[j];
      }
      chan[k] = static_cast<uint32_t>(red.reduce(acc));
    }
  }

  inject_residue_noise(out, noise, streams::tile_noise(tile_key));
  return out;
}

TruncatedMvm fixed_point_tile_mvm(const QuantizedMatrix& wq,
                                  const QuantizedVector& xq,
                                  const CoreConfig& cfg) {
  if (cfg.mode != CoreMode::fixed_point) {
    throw ConfigError("fixed_point_tile_mvm requires a fixed-point core config");
  }
  check_dims(wq, xq, cfg);
  const size_t h = xq.size();
  TruncatedMvm out;
  out.shift = cfg.output_bits() - cfg.b_adc;
  out.values.resize(h);
#ifdef _OPENMP
#pragma omp parallel for if (h >= 256)
#endif
  for (int64_t k = 0; k < static_cast<int64_t>(h); ++k) {
    int64_t acc = 0;
    const int32_t* w_row = wq.values.data() + k * h;
    for (size_t j = 0; j < h; ++j) {
      acc += static_cast<int64_t>(w_row[j]) * xq.values[j];
    }
    // Arithmetic shift = floor division: the ADC sees only the MSBs.
    out.values[k] = acc >> out.shift;
  }
  return out;
}

void inject_residue_noise(ResidueVector& rv, const NoiseModel& noise,
                          uint64_t stream_key) {
  if (noise.p <= 0.0) return;
  const ModuliSet& ms = rv.moduli();
  for (size_t i = 0; i < ms.size(); ++i) {
    Rng rng(derive_stream(noise.seed, {stream_key, i}));
    const uint64_t m = ms.modulus(i);
    for (uint32_t& r : rv.channel(i)) {
      if (rng.bernoulli(noise.p)) {
        r = static_cast<uint32_t>((r + 1 + rng.below(m - 1)) % m);
      }
    }
  }
}

void corrupt_codeword(std::span<uint32_t> residues, const ModuliSet& ms,
                      double p, Rng& rng) {
  if (p <= 0.0) return;
  for (size_t i = 0; i < residues.size(); ++i) {
    if (rng.bernoulli(p)) {
      const uint64_t m = ms.modulus(i);
      residues[i] = static_cast<uint32_t>((residues[i] + 1 + rng.below(m - 1)) % m);
    }
  }
}

}  // namespace rnsim

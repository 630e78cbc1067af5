#include "rnsim/energy.hpp"

#include <cmath>
#include <string>

namespace rnsim {

void ConverterParams::validate() const {
  if (c_unit <= 0.0 || v_dd <= 0.0 || k1 <= 0.0 || k2 <= 0.0) {
    throw ConfigError("converter parameters must be strictly positive");
  }
}

double dac_energy(int enob, const ConverterParams& params) {
  if (enob < 1) throw ConfigError("dac_energy needs enob >= 1");
  params.validate();
  const double bits = enob;
  return bits * bits * params.c_unit * params.v_dd * params.v_dd;
}

double adc_energy(int enob, const ConverterParams& params) {
  if (enob < 1) throw ConfigError("adc_energy needs enob >= 1");
  params.validate();
  return params.k1 * enob + params.k2 * std::pow(4.0, enob);
}

ConversionEnergy core_conversion_energy(const CoreConfig& cfg,
                                        const ConverterParams& params,
                                        int extra_redundant) {
  if (extra_redundant < 0) {
    throw ConfigError("extra_redundant must be >= 0");
  }
  ConversionEnergy e;
  if (cfg.mode == CoreMode::rns) {
    if (!cfg.moduli) throw ConfigError("rns core config is missing its moduli");
    const int units = static_cast<int>(cfg.moduli->size()) + extra_redundant;
    e.conversions = units;
    e.adc_enob = cfg.b_adc;
    e.dac_j = units * dac_energy(cfg.b_dac, params);
    e.adc_j = units * adc_energy(cfg.b_adc, params);
  } else {
    if (extra_redundant != 0) {
      throw ConfigError("redundant moduli only apply to the rns core");
    }
    const int b_out = cfg.output_bits();
    e.conversions = 1;
    e.adc_enob = b_out;
    e.dac_j = dac_energy(cfg.b_dac, params);
    e.adc_j = adc_energy(b_out, params);
  }
  return e;
}

double efficiency_ratio(int bits, int64_t h, const ConverterParams& params) {
  const ModuliSet ms = make_moduli_set(preset_moduli(preset_for_bits(bits)));
  const double rns_adc = static_cast<double>(ms.size()) * adc_energy(ms.bit_width(), params);
  const double fixed_adc = adc_energy(required_output_bits(bits, bits, h), params);
  return fixed_adc / rns_adc;
}

}  // namespace rnsim

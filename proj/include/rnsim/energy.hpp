#pragma once

#include "rnsim/analog_core.hpp"

namespace rnsim {

/// Data-converter energy coefficients. Defaults: 0.5 fF unit capacitance,
/// 1 V supply, 100 fJ/bit and 1 aJ ADC coefficients.
struct ConverterParams {
  double c_unit = 0.5e-15;  // F
  double v_dd = 1.0;        // V
  double k1 = 100e-15;      // J per ENOB
  double k2 = 1e-18;        // J, scales as 4^ENOB

  void validate() const;
};

/// DAC energy per conversion: ENOB^2 * C_u * V_dd^2.
double dac_energy(int enob, const ConverterParams& params = {});

/// ADC energy per conversion: k1 * ENOB + k2 * 4^ENOB. The exponential term
/// dominates beyond roughly 10 bits.
double adc_energy(int enob, const ConverterParams& params = {});

/// Converter energy per output element for one core.
struct ConversionEnergy {
  double dac_j = 0.0;
  double adc_j = 0.0;
  int conversions = 0;   // converter pairs per output element
  int adc_enob = 0;      // effective ADC precision used
};

/// rns mode: n MVM units mean n DAC + n ADC conversions per element, all at
/// the moduli bit width. fixed_point mode is costed as the same-precision
/// baseline: one DAC at b_dac and one ADC at the full b_out from the output
/// width rule, so both cores capture outputs losslessly. extra_redundant adds
/// that many redundant-moduli MVM units (converter counts scale linearly).
ConversionEnergy core_conversion_energy(const CoreConfig& cfg,
                                        const ConverterParams& params = {},
                                        int extra_redundant = 0);

/// Fixed-point-to-RNS ADC energy ratio for the preset moduli set at a given
/// bit width; the headline comparison of the two cores.
double efficiency_ratio(int bits, int64_t h, const ConverterParams& params = {});

}  // namespace rnsim

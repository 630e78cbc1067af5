#include <doctest.h>

#include <cmath>

#include "rnsim/energy.hpp"

using namespace rnsim;

TEST_CASE("dac energy") {
  CHECK(dac_energy(4) == doctest::Approx(8e-15));   // 16 * 0.5 fF * 1 V^2
  CHECK(dac_energy(1) == doctest::Approx(0.5e-15));
  CHECK(dac_energy(8) == doctest::Approx(32e-15));
  CHECK_THROWS_AS(dac_energy(0), ConfigError);
}

TEST_CASE("adc energy") {
  CHECK(adc_energy(4) == doctest::Approx(4.00256e-13));       // 400 fJ + 256 aJ
  CHECK(adc_energy(14) == doctest::Approx(2.69835456e-10));   // ~269.8 pJ
  CHECK(adc_energy(22) == doctest::Approx(1.759220804e-5).epsilon(1e-6));  // ~17.6 uJ
  CHECK_THROWS_AS(adc_energy(-1), ConfigError);

  ConverterParams bad;
  bad.k1 = 0.0;
  CHECK_THROWS_AS(adc_energy(4, bad), ConfigError);
}

TEST_CASE("core conversion energy") {
  SUBCASE("rns preset at b = 4") {
    const ConversionEnergy e = core_conversion_energy(CoreConfig::rns_preset(4, 128));
    CHECK(e.conversions == 4);
    CHECK(e.adc_enob == 4);
    CHECK(e.adc_j == doctest::Approx(1.601024e-12));  // 4 x 400.256 fJ
    CHECK(e.dac_j == doctest::Approx(4 * 8e-15));
  }
  SUBCASE("same-precision fixed-point baseline at b = 4, h = 128") {
    const ConversionEnergy e =
        core_conversion_energy(CoreConfig::fixed_point(128, 4, 4, 4));
    CHECK(e.conversions == 1);
    CHECK(e.adc_enob == 14);  // b_out, not the truncating b_adc
    CHECK(e.adc_j == doctest::Approx(2.69835456e-10));
  }
  SUBCASE("fixed point at b = 8, h = 128 costs about 17.6 uJ") {
    const ConversionEnergy e =
        core_conversion_energy(CoreConfig::fixed_point(128, 8, 8, 8));
    CHECK(e.adc_enob == 22);
    CHECK(e.adc_j == doctest::Approx(1.759220804e-5).epsilon(1e-6));
  }
  SUBCASE("redundant moduli scale converter counts linearly") {
    const ConversionEnergy base = core_conversion_energy(CoreConfig::rns_preset(4, 128));
    const ConversionEnergy ext =
        core_conversion_energy(CoreConfig::rns_preset(4, 128), ConverterParams{}, 2);
    CHECK(ext.conversions == 6);
    CHECK(ext.adc_j == doctest::Approx(base.adc_j * 6.0 / 4.0));
    CHECK(ext.dac_j == doctest::Approx(base.dac_j * 6.0 / 4.0));
  }
}

TEST_CASE("efficiency ratio") {
  SUBCASE("headline values at h = 128") {
    CHECK(efficiency_ratio(4, 128) == doctest::Approx(168.5).epsilon(0.01));
    CHECK(efficiency_ratio(8, 128) == doctest::Approx(6.775e6).epsilon(0.01));
  }
  SUBCASE("strictly increasing in b") {
    double prev = 0.0;
    for (int b = 4; b <= 8; ++b) {
      const double r = efficiency_ratio(b, 128);
      CHECK(r > prev);
      CHECK(r > 0.0);
      prev = r;
    }
  }
  SUBCASE("intermediate widths sit between the extremes") {
    const double r4 = efficiency_ratio(4, 128);
    const double r6 = efficiency_ratio(6, 128);
    const double r8 = efficiency_ratio(8, 128);
    CHECK(r6 > r4);
    CHECK(r6 < r8);
  }
}

TEST_CASE("adc dominates dac") {
  // At the converter widths the rns core uses (4-8 bits) the ADC costs tens
  // of times the DAC; at the b_out widths a lossless fixed-point core needs,
  // the gap reaches three orders of magnitude and beyond.
  for (int enob = 4; enob <= 8; ++enob) {
    const double gap = adc_energy(enob) / dac_energy(enob);
    CHECK(gap > 20.0);
    CHECK(gap < 100.0);
  }
  CHECK(adc_energy(14) / dac_energy(14) > 1000.0);
  CHECK(adc_energy(22) / dac_energy(22) > 1000.0);
}

TEST_CASE("energies are positive and finite") {
  for (int enob = 1; enob <= 24; ++enob) {
    CHECK(dac_energy(enob) > 0.0);
    CHECK(adc_energy(enob) > 0.0);
    CHECK(std::isfinite(adc_energy(enob)));
  }
}

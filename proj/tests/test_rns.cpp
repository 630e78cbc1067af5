#include <doctest.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "rnsim/barrett.hpp"
#include "rnsim/reference.hpp"
#include "rnsim/rng.hpp"
#include "rnsim/rns.hpp"

using namespace rnsim;

namespace {

// Independent CRT oracle: scan [0, M) for the unique match. Small M only.
std::optional<uint64_t> crt_by_scan(std::span<const uint32_t> residues,
                                    const std::vector<uint64_t>& moduli) {
  uint64_t m_total = 1;
  for (uint64_t m : moduli) m_total *= m;
  for (uint64_t v = 0; v < m_total; ++v) {
    bool match = true;
    for (size_t i = 0; i < moduli.size(); ++i) {
      if (v % moduli[i] != residues[i]) {
        match = false;
        break;
      }
    }
    if (match) return v;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("moduli set construction") {
  SUBCASE("table preset {15,14,13,11}") {
    const ModuliSet ms = make_moduli_set({15, 14, 13, 11});
    CHECK(ms.product() == 30030);
    CHECK(ms.bit_width() == 4);
  }
  SUBCASE("{3,5,7} weights") {
    const ModuliSet ms = make_moduli_set({3, 5, 7});
    CHECK(ms.product() == 105);
    REQUIRE(ms.crt_weights().size() == 3);
    CHECK(ms.crt_weights()[0].big_mod == 35);
    CHECK(ms.crt_weights()[0].inverse == 2);
    CHECK(ms.crt_weights()[1].big_mod == 21);
    CHECK(ms.crt_weights()[1].inverse == 1);
    CHECK(ms.crt_weights()[2].big_mod == 15);
    CHECK(ms.crt_weights()[2].inverse == 1);
  }
  SUBCASE("co-primality is enforced with the offending pair named") {
    try {
      make_moduli_set({4, 6});
      FAIL("expected NotCoprimeError");
    } catch (const NotCoprimeError& e) {
      CHECK(e.lhs() == 4);
      CHECK(e.rhs() == 6);
      CHECK(e.factor() == 2);
      CHECK(std::string(e.what()) == "moduli 4 and 6 share factor 2");
    }
  }
  SUBCASE("empty and tiny moduli rejected") {
    CHECK_THROWS_AS(make_moduli_set({}), ConfigError);
    CHECK_THROWS_AS(make_moduli_set({1, 3}), ConfigError);
  }
  SUBCASE("product overflow rejected") {
    // Nine co-prime values near 2^31 push the product past 2^63.
    std::vector<uint64_t> huge = {2147483647, 2147483629, 2147483587,
                                  2147483579, 2147483563};
    CHECK_THROWS_AS(make_moduli_set(huge), OverflowError);
  }
  SUBCASE("CRT constants satisfy |M_i T_i|_{m_i} = 1 for every preset") {
    for (const auto& [name, moduli] : moduli_presets()) {
      const ModuliSet ms = make_moduli_set(moduli);
      for (size_t i = 0; i < ms.size(); ++i) {
        const auto& w = ms.crt_weights()[i];
        CHECK((static_cast<u128>(w.big_mod % ms.modulus(i)) * w.inverse) %
                  ms.modulus(i) ==
              1);
      }
    }
  }
}

TEST_CASE("forward conversion") {
  const ModuliSet ms = make_moduli_set({3, 5, 7});
  SUBCASE("positive value") {
    CHECK(forward_convert(23, ms) == std::vector<uint32_t>{2, 3, 2});
  }
  SUBCASE("zero") {
    CHECK(forward_convert(0, ms) == std::vector<uint32_t>{0, 0, 0});
  }
  SUBCASE("negative value uses the complement mapping") {
    // -1 = 104 mod 105; 104 mod {3,5,7} = {2,4,6}.
    CHECK(forward_convert(-1, ms) == std::vector<uint32_t>{2, 4, 6});
  }
  SUBCASE("out-of-range values rejected") {
    CHECK_THROWS_AS(forward_convert(53, ms), OutOfRangeError);
    CHECK_THROWS_AS(forward_convert(-53, ms), OutOfRangeError);
  }
}

TEST_CASE("crt reconstruction matches the exhaustive-scan oracle") {
  const std::vector<uint64_t> moduli = {3, 5, 7};
  const ModuliSet ms = make_moduli_set(moduli);

  const std::vector<uint32_t> a = {2, 3, 2};
  CHECK(crt_reconstruct(a, ms) == 23);
  CHECK(crt_by_scan(a, moduli) == 23);

  const std::vector<uint32_t> zeros = {0, 0, 0};
  CHECK(crt_reconstruct(zeros, ms) == 0);

  const std::vector<uint32_t> b = {2, 4, 6};
  CHECK(crt_reconstruct(b, ms) == 104);
  CHECK(crt_by_scan(b, moduli) == 104);

  CHECK_THROWS_AS(crt_reconstruct(std::vector<uint32_t>{3, 0, 0}, ms),
                  InvalidResidueError);
}

TEST_CASE("signed decode") {
  CHECK(signed_decode(104, 105) == -1);
  CHECK(signed_decode(52, 105) == 52);
  CHECK(signed_decode(53, 105) == -52);
  CHECK(signed_decode(0, 105) == 0);
}

TEST_CASE("round trip over full and sampled ranges") {
  SUBCASE("exhaustive for small products") {
    for (const std::vector<uint64_t> moduli :
         {std::vector<uint64_t>{3, 5, 7}, std::vector<uint64_t>{15, 14, 13, 11}}) {
      const ModuliSet ms = make_moduli_set(moduli);
      for (uint64_t v = 0; v < ms.product(); ++v) {
        const int64_t signed_v = signed_decode(v, ms);
        if (!ms.signed_range().contains(signed_v)) continue;
        CHECK(crt_reconstruct(forward_convert(signed_v, ms), ms) == v);
      }
    }
  }
  SUBCASE("random sample for every preset") {
    for (const auto& [name, moduli] : moduli_presets()) {
      const ModuliSet ms = make_moduli_set(moduli);
      Rng rng(0xabcd);
      for (int i = 0; i < 20000; ++i) {
        const uint64_t v = rng.below(ms.product());
        const int64_t signed_v = signed_decode(v, ms);
        if (!ms.signed_range().contains(signed_v)) continue;
        CHECK(crt_reconstruct(forward_convert(signed_v, ms), ms) == v);
      }
    }
  }
}

TEST_CASE("ring homomorphism on random in-range pairs") {
  const ModuliSet ms = make_moduli_set({63, 62, 61, 59});
  const SignedRange range = ms.signed_range();
  Rng rng(0x5eed);
  for (int i = 0; i < 2000; ++i) {
    const auto x = static_cast<int64_t>(rng.below(60000)) - 30000;
    const auto y = static_cast<int64_t>(rng.below(60000)) - 30000;
    const auto rx = forward_convert(x, ms);
    const auto ry = forward_convert(y, ms);

    if (range.contains(x * y)) {
      std::vector<uint32_t> prod(ms.size());
      for (size_t j = 0; j < ms.size(); ++j) {
        prod[j] = static_cast<uint32_t>((static_cast<uint64_t>(rx[j]) * ry[j]) %
                                        ms.modulus(j));
      }
      CHECK(signed_decode(crt_reconstruct(prod, ms), ms) == x * y);
    }
    if (range.contains(x + y)) {
      std::vector<uint32_t> sum(ms.size());
      for (size_t j = 0; j < ms.size(); ++j) {
        sum[j] = static_cast<uint32_t>((static_cast<uint64_t>(rx[j]) + ry[j]) %
                                       ms.modulus(j));
      }
      CHECK(signed_decode(crt_reconstruct(sum, ms), ms) == x + y);
    }
  }
}

TEST_CASE("residue dot product") {
  const ModuliSet ms = make_moduli_set({3, 5, 7});
  SUBCASE("worked example") {
    const std::vector<int64_t> a = {1, 2, 3};
    const std::vector<int64_t> b = {4, 5, 6};
    const auto dot = residue_dot_product(ResidueVector::encode(a, ms),
                                         ResidueVector::encode(b, ms));
    // 1*4 + 2*5 + 3*6 = 32 -> {2, 2, 4}.
    CHECK(dot == std::vector<uint32_t>{2, 2, 4});
  }
  SUBCASE("all-zero operand") {
    const std::vector<int64_t> a = {7, -9, 11};
    const std::vector<int64_t> z = {0, 0, 0};
    const auto dot = residue_dot_product(ResidueVector::encode(a, ms),
                                         ResidueVector::encode(z, ms));
    CHECK(dot == std::vector<uint32_t>{0, 0, 0});
  }
  SUBCASE("mismatches rejected") {
    const std::vector<int64_t> a = {1, 2};
    const std::vector<int64_t> b = {1, 2, 3};
    CHECK_THROWS_AS(residue_dot_product(ResidueVector::encode(a, ms),
                                        ResidueVector::encode(b, ms)),
                    DimensionMismatchError);
    const ModuliSet other = make_moduli_set({3, 5, 11});
    CHECK_THROWS_AS(residue_dot_product(ResidueVector::encode(b, ms),
                                        ResidueVector::encode(b, other)),
                    ModuliMismatchError);
  }
}

TEST_CASE("dot product equals the wide-integer oracle") {
  SUBCASE("in-range dots decode exactly") {
    for (const auto& [name, moduli] : moduli_presets()) {
      const ModuliSet ms = make_moduli_set(moduli);
      const SignedRange range = ms.signed_range();
      Rng rng(0xd07);
      const size_t h = 16;
      for (int i = 0; i < 500; ++i) {
        std::vector<int64_t> a(h), b(h);
        const int64_t bound = 1 << (ms.bit_width() - 1);
        for (auto& v : a) v = static_cast<int64_t>(rng.below(2 * bound)) - bound;
        for (auto& v : b) v = static_cast<int64_t>(rng.below(2 * bound)) - bound;
        const i128 exact = ref::dot_exact(std::span<const int64_t>(a),
                                          std::span<const int64_t>(b));
        if (!range.contains(static_cast<int64_t>(exact))) continue;
        const auto dot = residue_dot_product(ResidueVector::encode(a, ms),
                                             ResidueVector::encode(b, ms));
        CHECK(signed_decode(crt_reconstruct(dot, ms), ms) ==
              static_cast<int64_t>(exact));
      }
    }
  }
  SUBCASE("congruence holds even when the dot product overflows the range") {
    const ModuliSet ms = make_moduli_set({15, 14, 13, 11});
    Rng rng(0xbeef);
    const size_t h = 512;  // large enough to overflow M = 30030 routinely
    for (int i = 0; i < 200; ++i) {
      std::vector<int64_t> a(h), b(h);
      for (auto& v : a) v = static_cast<int64_t>(rng.below(2000)) - 1000;
      for (auto& v : b) v = static_cast<int64_t>(rng.below(2000)) - 1000;
      // Operands must individually be encodable; the dot may overflow.
      const auto dot = residue_dot_product(ResidueVector::encode(a, ms),
                                           ResidueVector::encode(b, ms));
      const i128 exact = ref::dot_exact(std::span<const int64_t>(a),
                                        std::span<const int64_t>(b));
      const auto m_total = static_cast<i128>(ms.product());
      const auto expected = static_cast<uint64_t>(((exact % m_total) + m_total) % m_total);
      CHECK(crt_reconstruct(dot, ms) == expected);
    }
  }
}

TEST_CASE("required output bits") {
  CHECK(required_output_bits(4, 4, 128) == 14);
  CHECK(required_output_bits(8, 8, 128) == 22);
  CHECK(required_output_bits(1, 1, 1) == 1);
  CHECK(required_output_bits(4, 4, 100) == 14);  // non-power-of-two rounds up
  CHECK_THROWS_AS(required_output_bits(0, 4, 128), ConfigError);

  // Every preset covers its full-width configuration at h = 128.
  for (int b = 4; b <= 8; ++b) {
    const ModuliSet ms = make_moduli_set(preset_moduli(preset_for_bits(b)));
    CHECK(covers_output_range(ms, b, b, 128));
  }
  CHECK_FALSE(covers_output_range(make_moduli_set({3, 5, 7}), 4, 4, 128));
}

TEST_CASE("barrett reduction agrees with the naive remainder") {
  Rng rng(0xba11);
  const std::vector<uint64_t> moduli = {2,    3,     7,      11,         255,
                                        256,  65535, 65537,  4294967295, 30030,
                                        1 << 20};
  for (const uint64_t m : moduli) {
    const BarrettReducer red(m);
    for (int i = 0; i < 5000; ++i) {
      const u128 n = (static_cast<u128>(rng.next()) << 64) | rng.next();
      CHECK(red.reduce(n) == ref::mod_naive(n, m));
    }
    CHECK(red.reduce(0) == 0);
    CHECK(red.reduce(m) == 0);
    CHECK(red.reduce(m - 1) == m - 1);
  }
}

TEST_CASE("residue vector encode/decode round trip") {
  const ModuliSet ms = make_moduli_set({15, 14, 13, 11});
  std::vector<int64_t> values;
  Rng rng(0x77);
  for (int i = 0; i < 64; ++i) {
    values.push_back(static_cast<int64_t>(rng.below(30029)) - 15014);
  }
  const ResidueVector rv = ResidueVector::encode(values, ms);
  CHECK(rv.decode_signed() == values);
}

#include "rnsim/reference.hpp"

#include <string>

#include "rnsim/stream_keys.hpp"

namespace rnsim::ref {

namespace {

uint32_t reduce_signed_naive(int64_t value, uint64_t m) {
  int64_t r = value % static_cast<int64_t>(m);
  if (r < 0) r += static_cast<int64_t>(m);
  return static_cast<uint32_t>(r);
}

}  // namespace

uint64_t mod_naive(u128 n, uint64_t m) {
  return static_cast<uint64_t>(n % m);
}

uint64_t crt_reconstruct(std::span<const uint32_t> residues, const ModuliSet& ms) {
  if (residues.size() != ms.size()) {
    throw DimensionMismatchError("reference CRT: residue count mismatch");
  }
  const uint64_t M = ms.product();
  u128 acc = 0;
  for (size_t i = 0; i < ms.size(); ++i) {
    const CrtWeight& w = ms.crt_weights()[i];
    const u128 term = static_cast<u128>(residues[i]) * w.big_mod % M;
    acc += term * w.inverse % M;
  }
  return static_cast<uint64_t>(acc % M);
}

i128 dot_exact(std::span<const int32_t> a, std::span<const int32_t> b) {
  i128 acc = 0;
  for (size_t j = 0; j < a.size(); ++j) {
    acc += static_cast<i128>(a[j]) * b[j];
  }
  return acc;
}

i128 dot_exact(std::span<const int64_t> a, std::span<const int64_t> b) {
  i128 acc = 0;
  for (size_t j = 0; j < a.size(); ++j) {
    acc += static_cast<i128>(a[j]) * b[j];
  }
  return acc;
}

std::vector<i128> mvm_exact(const QuantizedMatrix& wq, const QuantizedVector& xq) {
  std::vector<i128> out(wq.rows);
  for (size_t k = 0; k < wq.rows; ++k) {
    i128 acc = 0;
    for (size_t j = 0; j < wq.cols; ++j) {
      acc += static_cast<i128>(wq.at(k, j)) * xq.values[j];
    }
    out[k] = acc;
  }
  return out;
}

std::vector<uint32_t> residue_dot_product(const ResidueVector& a,
                                          const ResidueVector& b) {
  if (!(a.moduli() == b.moduli())) {
    throw ModuliMismatchError("residue vectors use different moduli sets");
  }
  if (a.length() != b.length()) {
    throw DimensionMismatchError("reference dot product: length mismatch");
  }
  const ModuliSet& ms = a.moduli();
  std::vector<uint32_t> out(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    const uint64_t m = ms.modulus(i);
    const auto lhs = a.channel(i);
    const auto rhs = b.channel(i);
    uint64_t acc = 0;
    for (size_t j = 0; j < lhs.size(); ++j) {
      acc = (acc + static_cast<uint64_t>(lhs[j]) * rhs[j] % m) % m;
    }
    out[i] = static_cast<uint32_t>(acc);
  }
  return out;
}

ResidueVector rns_tile_mvm(const QuantizedMatrix& wq, const QuantizedVector& xq,
                           const CoreConfig& cfg, const NoiseModel& noise,
                           uint64_t tile_key) {
  if (cfg.mode != CoreMode::rns || !cfg.moduli) {
    throw ConfigError("reference tile MVM requires an rns-mode core config");
  }
  const ModuliSet& ms = *cfg.moduli;
  const size_t h = xq.size();
  if (wq.rows != h || wq.cols != h) {
    throw DimensionMismatchError("reference tile MVM: dimension mismatch");
  }
  ResidueVector out(ms, h);
  for (size_t i = 0; i < ms.size(); ++i) {
    const uint64_t m = ms.modulus(i);
    auto chan = out.channel(i);
    for (size_t k = 0; k < h; ++k) {
      uint64_t acc = 0;
      for (size_t j = 0; j < h; ++j) {
        const uint64_t w = reduce_signed_naive(wq.at(k, j), m);
        const uint64_t x = reduce_signed_naive(xq.values[j], m);
        acc = (acc + w * x % m) % m;
      }
      chan[k] = static_cast<uint32_t>(acc);
    }
  }
  inject_residue_noise(out, noise, streams::tile_noise(tile_key));
  return out;
}

ErrorRates estimate_rates(const RrnsCode& code, const NoiseModel& noise,
                          uint64_t trials) {
  if (trials < 1) throw ConfigError("estimate_rates needs trials >= 1");
  ErrorRates rates;
  rates.trials = trials;
  rates.p = noise.p;
  for (uint64_t trial = 0; trial < trials; ++trial) {
    Rng rng(streams::rate_trial(noise.seed, trial));
    const uint64_t value = rng.below(code.legitimate_range());
    std::vector<uint32_t> cw = rrns_encode(value, code);
    corrupt_codeword(cw, code.moduli(), noise.p, rng);
    switch (classify_case(vote_decode(cw, code), value)) {
      case RrnsCase::corrected: ++rates.n_c; break;
      case RrnsCase::detected: ++rates.n_d; break;
      case RrnsCase::undetected: ++rates.n_u; break;
    }
  }
  const auto total = static_cast<double>(trials);
  rates.p_c = static_cast<double>(rates.n_c) / total;
  rates.p_d = static_cast<double>(rates.n_d) / total;
  rates.p_u = static_cast<double>(rates.n_u) / total;
  return rates;
}

std::vector<double> mvm_double(const Matrix& w, std::span<const double> x) {
  if (w.cols != x.size()) {
    throw DimensionMismatchError("mvm_double: matrix has " + std::to_string(w.cols) +
                                 " columns, input has " + std::to_string(x.size()));
  }
  std::vector<double> out(w.rows, 0.0);
  for (size_t r = 0; r < w.rows; ++r) {
    double acc = 0.0;
    const double* row = w.row(r);
    for (size_t c = 0; c < w.cols; ++c) {
      acc += row[c] * x[c];
    }
    out[r] = acc;
  }
  return out;
}

}  // namespace rnsim::ref

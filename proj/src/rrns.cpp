#include "rnsim/rrns.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rnsim/stream_keys.hpp"

namespace rnsim {

namespace {

// Modular inverse via extended Euclid (moduli fit in 32 bits).
uint64_t mod_inverse(uint64_t a, uint64_t m) {
  int64_t t = 0, new_t = 1;
  auto r = static_cast<int64_t>(m);
  auto new_r = static_cast<int64_t>(a % m);
  while (new_r != 0) {
    const int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (t < 0) t += static_cast<int64_t>(m);
  return static_cast<uint64_t>(t);
}

uint64_t group_reconstruct(const VoteGroup& g, std::span<const uint32_t> residues) {
  uint64_t acc = 0;
  for (size_t j = 0; j < g.indices.size(); ++j) {
    acc += g.multipliers[j].mul(residues[g.indices[j]]);
    if (acc >= g.product) acc -= g.product;
  }
  return acc;
}

}  // namespace

RrnsCode RrnsCode::make(ModuliSet ms, int k) {
  const int n = static_cast<int>(ms.size());
  if (k < 1 || k > n) {
    throw ConfigError("rrns k must satisfy 1 <= k <= n = " + std::to_string(n));
  }

  RrnsCode code(std::move(ms));
  const ModuliSet& base = code.ms_;
  code.k_ = k;
  code.t_ = (n - k) / 2;

  // Designate the k smallest moduli as non-redundant. Their product is the
  // smallest over all k-subsets, so it is the legitimate range.
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return base.modulus(a) < base.modulus(b);
  });
  std::vector<uint32_t> nonredundant(order.begin(), order.begin() + k);
  std::sort(nonredundant.begin(), nonredundant.end());

  uint64_t range = 1;
  for (uint32_t idx : nonredundant) {
    range *= base.modulus(idx);
  }
  code.legitimate_range_ = range;

  // Precompute CRT constants for every C(n, k) group.
  std::vector<uint32_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    VoteGroup g;
    g.indices = pick;
    u128 prod = 1;
    for (uint32_t idx : pick) prod *= base.modulus(idx);
    g.product = static_cast<uint64_t>(prod);
    for (uint32_t idx : pick) {
      const uint64_t m = base.modulus(idx);
      const uint64_t big = g.product / m;
      const uint64_t inv = mod_inverse(big % m, m);
      g.multipliers.emplace_back(
          static_cast<uint64_t>(static_cast<u128>(big) * inv % g.product),
          g.product);
    }
    if (g.indices == nonredundant) {
      code.nonredundant_group_ = code.groups_.size();
    }
    code.groups_.push_back(std::move(g));

    // Next k-combination of {0, ..., n-1}.
    int i = k - 1;
    while (i >= 0 && pick[i] == static_cast<uint32_t>(n - k + i)) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }

  return code;
}

std::vector<uint32_t> rrns_encode(uint64_t value, const RrnsCode& code) {
  if (value >= code.legitimate_range()) {
    throw OutOfRangeError("value " + std::to_string(value) +
                          " outside legitimate range [0, " +
                          std::to_string(code.legitimate_range()) + ")");
  }
  const ModuliSet& ms = code.moduli();
  std::vector<uint32_t> residues(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    residues[i] = static_cast<uint32_t>(value % ms.modulus(i));
  }
  return residues;
}

VoteOutcome vote_decode(std::span<const uint32_t> residues, const RrnsCode& code) {
  const ModuliSet& ms = code.moduli();
  if (residues.size() != ms.size()) {
    throw DimensionMismatchError("expected " + std::to_string(ms.size()) +
                                 " residues, got " + std::to_string(residues.size()));
  }
  for (size_t i = 0; i < residues.size(); ++i) {
    if (residues[i] >= ms.modulus(i)) {
      throw InvalidResidueError("residue " + std::to_string(residues[i]) +
                                " not reduced modulo " +
                                std::to_string(ms.modulus(i)));
    }
  }

  VoteOutcome out;
  out.groups_total = static_cast<int>(code.groups().size());

  // Tally valid candidates. Group counts are tiny, so a flat scan beats a map.
  struct Tally {
    uint64_t value;
    int votes;
  };
  std::vector<Tally> tallies;
  tallies.reserve(code.groups().size());
  uint64_t fallback = 0;
  for (size_t gi = 0; gi < code.groups().size(); ++gi) {
    const uint64_t candidate = group_reconstruct(code.groups()[gi], residues);
    if (gi == code.nonredundant_group()) fallback = candidate;
    if (candidate >= code.legitimate_range()) continue;  // cannot be a codeword
    bool found = false;
    for (Tally& t : tallies) {
      if (t.value == candidate) {
        ++t.votes;
        found = true;
        break;
      }
    }
    if (!found) tallies.push_back(Tally{candidate, 1});
  }

  int best = 0, second = 0;
  uint64_t best_value = 0;
  for (const Tally& t : tallies) {
    if (t.votes > best) {
      second = best;
      best = t.votes;
      best_value = t.value;
    } else if (t.votes > second) {
      second = t.votes;
    }
  }

  if (best > 0 && best > second) {
    out.corrected = true;
    out.value = best_value;
    out.groups_agreeing = best;
  } else {
    out.corrected = false;
    out.value = fallback;
    out.groups_agreeing = best;
  }
  return out;
}

RrnsCase classify_case(const VoteOutcome& outcome, uint64_t truth) {
  if (!outcome.corrected) return RrnsCase::detected;
  return outcome.value == truth ? RrnsCase::corrected : RrnsCase::undetected;
}

ErrorRates estimate_rates(const RrnsCode& code, const NoiseModel& noise,
                          uint64_t trials) {
  if (trials < 1) throw ConfigError("estimate_rates needs trials >= 1");
  uint64_t n_c = 0, n_d = 0, n_u = 0;
  const auto count = static_cast<int64_t>(trials);

#ifdef _OPENMP
#pragma omp parallel for reduction(+ : n_c, n_d, n_u) schedule(static)
#endif
  for (int64_t trial = 0; trial < count; ++trial) {
    Rng rng(streams::rate_trial(noise.seed, static_cast<uint64_t>(trial)));
    const uint64_t value = rng.below(code.legitimate_range());
    std::vector<uint32_t> cw = rrns_encode(value, code);
    corrupt_codeword(cw, code.moduli(), noise.p, rng);
    switch (classify_case(vote_decode(cw, code), value)) {
      case RrnsCase::corrected: ++n_c; break;
      case RrnsCase::detected: ++n_d; break;
      case RrnsCase::undetected: ++n_u; break;
    }
  }

  ErrorRates rates;
  rates.n_c = n_c;
  rates.n_d = n_d;
  rates.n_u = n_u;
  rates.trials = trials;
  rates.p = noise.p;
  const auto total = static_cast<double>(trials);
  rates.p_c = static_cast<double>(n_c) / total;
  rates.p_d = static_cast<double>(n_d) / total;
  rates.p_u = static_cast<double>(n_u) / total;
  return rates;
}

double p_err_retry(const ErrorRates& rates, int attempts) {
  if (attempts < 1) throw ConfigError("p_err_retry needs attempts >= 1");
  // 1 - p_c * (1 + p_d + ... + p_d^(R-1)): the first attempt succeeds with
  // p_c and each retry is reached only through a detected error. Evaluated
  // through the equivalent closed form (p_u + p_c p_d^R) / (p_u + p_c);
  // the literal difference from 1 cancels away the p_d^R tail once it drops
  // below one ulp.
  const double denom = rates.p_u + rates.p_c;
  if (rates.p_d >= 1.0 || denom <= 0.0) return 1.0;
  double tail = 1.0;
  for (int j = 0; j < attempts; ++j) tail *= rates.p_d;
  return (rates.p_u + rates.p_c * tail) / denom;
}

double p_err_limit(const ErrorRates& rates) {
  const double denom = rates.p_u + rates.p_c;
  if (denom <= 0.0) return 1.0;  // every attempt is detected-uncorrectable
  return rates.p_u / denom;
}

RetryResult retry_protocol_simulate(const RrnsCode& code, const NoiseModel& noise,
                                    int attempts, uint64_t trials) {
  if (attempts < 1) throw ConfigError("retry_protocol_simulate needs attempts >= 1");
  uint64_t errors = 0;
  const auto count = static_cast<int64_t>(trials);

#ifdef _OPENMP
#pragma omp parallel for reduction(+ : errors) schedule(static)
#endif
  for (int64_t trial = 0; trial < count; ++trial) {
    const auto t = static_cast<uint64_t>(trial);
    Rng value_rng(streams::retry_value(noise.seed, t));
    const uint64_t value = value_rng.below(code.legitimate_range());
    const std::vector<uint32_t> clean = rrns_encode(value, code);

    bool settled = false;
    uint64_t output = 0;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      // Re-running the dot product draws fresh analog noise.
      Rng rng(streams::retry_attempt(noise.seed, t, static_cast<uint64_t>(attempt)));
      std::vector<uint32_t> cw = clean;
      corrupt_codeword(cw, code.moduli(), noise.p, rng);
      const VoteOutcome outcome = vote_decode(cw, code);
      if (outcome.corrected) {  // cases 1 and 3 look identical to the decoder
        settled = true;
        output = outcome.value;
        break;
      }
    }
    if (!settled || output != value) ++errors;
  }

  return RetryResult{errors, trials};
}

}  // namespace rnsim

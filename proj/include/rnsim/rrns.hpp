#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rnsim/analog_core.hpp"
#include "rnsim/rns.hpp"

namespace rnsim {

/// One reconstruction group: a k-subset of the moduli with its own CRT
/// constants. Every group reconstructs a candidate in [0, product).
struct VoteGroup {
  std::vector<uint32_t> indices;
  uint64_t product = 0;
  std::vector<ShoupMultiplier> multipliers;  // |(P/m_i) T_i|_P per member
};

/// Redundant RNS code over n moduli, k of them non-redundant. The k smallest
/// moduli carry the data: every k-subset product is then at least the
/// legitimate range, which is what gives the code its correction capability
/// t = floor((n - k) / 2). Redundant moduli are therefore always the largest.
class RrnsCode {
 public:
  static RrnsCode make(ModuliSet ms, int k);

  const ModuliSet& moduli() const { return ms_; }
  int n() const { return static_cast<int>(ms_.size()); }
  int k() const { return k_; }
  int correctable() const { return t_; }

  /// M_k: codewords encode values in [0, legitimate_range).
  uint64_t legitimate_range() const { return legitimate_range_; }

  const std::vector<VoteGroup>& groups() const { return groups_; }

  /// Index of the group made of the designated non-redundant moduli.
  size_t nonredundant_group() const { return nonredundant_group_; }

 private:
  explicit RrnsCode(ModuliSet ms) : ms_(std::move(ms)) {}

  ModuliSet ms_;
  int k_ = 0;
  int t_ = 0;
  uint64_t legitimate_range_ = 0;
  std::vector<VoteGroup> groups_;
  size_t nonredundant_group_ = 0;
};

/// Residues of value against all n moduli. Throws OutOfRangeError when the
/// value is outside the legitimate range.
std::vector<uint32_t> rrns_encode(uint64_t value, const RrnsCode& code);

/// Decode result. When corrected is false the value is the best-effort
/// reconstruction (the non-redundant group), kept only so callers always have
/// a definite output; the decoder has flagged it as unreliable.
struct VoteOutcome {
  bool corrected = false;
  uint64_t value = 0;
  int groups_agreeing = 0;
  int groups_total = 0;
};

/// Majority voting over the C(n, k) reconstruction groups. Candidates at or
/// above the legitimate range cannot be codewords and are discarded; the
/// remaining votes elect a winner only if it beats every other candidate
/// outright (a tie means the error is detected but not correctable). This
/// plurality rule is what guarantees correction of up to t residue errors:
/// with e <= t errors the true value collects C(n-e, k) >= 2 groups while any
/// other candidate can collect at most C(k+e-1, e-1) of them.
VoteOutcome vote_decode(std::span<const uint32_t> residues, const RrnsCode& code);

/// Ground-truth-side classification of a decode outcome.
enum class RrnsCase {
  corrected = 1,     // case 1: no error or corrected
  detected = 2,      // case 2: detected but not correctable
  undetected = 3,    // case 3: silently wrong
};

RrnsCase classify_case(const VoteOutcome& outcome, uint64_t truth);

/// Empirical single-attempt outcome probabilities.
struct ErrorRates {
  double p_c = 0.0;
  double p_d = 0.0;
  double p_u = 0.0;
  uint64_t n_c = 0;
  uint64_t n_d = 0;
  uint64_t n_u = 0;
  uint64_t trials = 0;
  double p = 0.0;  // underlying per-residue error probability
};

/// Monte Carlo estimate of (p_c, p_d, p_u): uniform values in [0, M_k),
/// independent residue corruption, vote decode, classify. Deterministic for a
/// given seed and independent of the parallel schedule.
ErrorRates estimate_rates(const RrnsCode& code, const NoiseModel& noise,
                          uint64_t trials);

/// Probability of an erroneous output codeword after up to R attempts where
/// each detected (case 2) outcome triggers a retry:
/// p_err(R) = 1 - p_c * sum_{j=0}^{R-1} p_d^j.
double p_err_retry(const ErrorRates& rates, int attempts);

/// R -> infinity limit of p_err_retry: p_u / (p_u + p_c).
double p_err_limit(const ErrorRates& rates);

struct RetryResult {
  uint64_t errors = 0;
  uint64_t trials = 0;

  double p_err() const {
    return trials == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(trials);
  }
};

/// Simulates the retry protocol: per trial up to R attempts with fresh noise;
/// any corrected-looking outcome stops (the decoder cannot tell case 1 from
/// case 3); the output is erroneous when it differs from the truth or every
/// attempt was detected-uncorrectable.
RetryResult retry_protocol_simulate(const RrnsCode& code, const NoiseModel& noise,
                                    int attempts, uint64_t trials);

}  // namespace rnsim

#pragma once

#include <cstdint>
#include <vector>

#include "rnsim/csv.hpp"
#include "rnsim/energy.hpp"
#include "rnsim/model.hpp"
#include "rnsim/rrns.hpp"

namespace rnsim {

/// Default experiment seed; every run is reproducible from (config, seed).
inline constexpr uint64_t kDefaultSeed = 12345;

/// Uniform sample of `count` distinct indices out of [0, n), sorted.
std::vector<uint32_t> sample_indices(uint64_t n, uint64_t count, uint64_t seed);

/// Redundant extension moduli for a preset: co-prime with the base set and at
/// least as large as its largest modulus, so they can only serve as the
/// redundant part of a code.
std::vector<uint64_t> redundant_extension(int bits, int count);

// ---------------------------------------------------------------------------
// Dot-product error distribution (both cores vs the float ground truth).

struct DotprodErrorConfig {
  std::vector<int> bits{4, 5, 6, 7, 8};
  int h = 128;
  uint64_t trials = 10000;
  uint64_t seed = kDefaultSeed;
};

struct DotprodErrorStats {
  int bits = 0;
  uint64_t trials = 0;
  double rns_mean_abs = 0.0;
  double rns_max_abs = 0.0;
  double fixed_mean_abs = 0.0;
  double fixed_max_abs = 0.0;
  double ratio = 0.0;  // fixed mean over rns mean
};

std::vector<DotprodErrorStats> run_dotprod_error(const DotprodErrorConfig& cfg);
ExperimentResult dotprod_error_experiment(const DotprodErrorConfig& cfg);

/// Signed-error histograms for both cores, `bins` buckets per bit width.
ExperimentResult dotprod_error_histogram(const DotprodErrorConfig& cfg, int bins);

// ---------------------------------------------------------------------------
// Accuracy over a (bit width, tile size) grid for both cores.

struct AccuracySweepConfig {
  std::vector<int> bits{4};
  std::vector<int> hs{16, 64, 128};
  int num_seeds = 3;
  uint64_t seed = kDefaultSeed;
  uint64_t eval_count = 0;  // 0 = the whole test set
  bool include_rns = true;
  bool include_fixed = true;
  double noise_p = 0.0;  // rns output-residue noise
};

ExperimentResult accuracy_sweep(const ModelSpec& model, const Dataset& ds,
                                const AccuracySweepConfig& cfg);

// ---------------------------------------------------------------------------
// Accuracy under noise with RRNS protection, swept over redundancy and
// retry budget.

struct NoiseSweepConfig {
  int bits = 6;
  int h = 128;
  std::vector<int> extra_redundant{0, 1, 2};
  std::vector<double> ps{0.001, 0.003, 0.01, 0.03, 0.1};
  std::vector<int> attempts{1, 2, 4};
  uint64_t eval_count = 120;
  uint64_t rate_trials = 20000;
  uint64_t seed = kDefaultSeed;
};

struct NoiseSweepRow {
  int extra = 0;
  int attempts = 0;
  double p = 0.0;
  double p_c = 0.0, p_d = 0.0, p_u = 0.0;
  double p_err = 0.0;  // analytic, from the estimated rates
  double accuracy = 0.0;
  uint64_t correct = 0, total = 0;
};

struct NoiseSweepOutput {
  std::vector<NoiseSweepRow> rows;
  double float_accuracy = 0.0;
  int bits = 0, h = 0, n_base = 0;

  ExperimentResult to_result(const NoiseSweepConfig& cfg) const;
};

/// For each (extra, attempts): the analytic p_err at the first swept p where
/// accuracy drops below 0.99 * float accuracy (+inf when it never does).
struct NoiseCutoff {
  int extra = 0;
  int attempts = 0;
  double p = 0.0;
  double p_err = 0.0;
  bool reached = false;
};

NoiseSweepOutput run_noise_sweep(const ModelSpec& model, const Dataset& ds,
                                 const NoiseSweepConfig& cfg);
std::vector<NoiseCutoff> noise_sweep_cutoffs(const NoiseSweepOutput& out);

// ---------------------------------------------------------------------------
// RRNS output-error-probability sweep (rates + retry protocol).

struct RrnsPerrConfig {
  std::vector<uint64_t> moduli;
  int k = 0;
  std::vector<double> ps{0.01, 0.05, 0.1};
  std::vector<int> attempts{1, 2, 3, 5, 10};
  uint64_t trials = 100000;
  uint64_t seed = kDefaultSeed;
};

ExperimentResult rrns_perr_sweep(const RrnsPerrConfig& cfg);

// ---------------------------------------------------------------------------
// Converter energy table for both cores.

struct EnergyTableConfig {
  std::vector<int> bits{4, 5, 6, 7, 8};
  int64_t h = 128;
  ConverterParams params{};
};

ExperimentResult energy_table(const EnergyTableConfig& cfg);

}  // namespace rnsim

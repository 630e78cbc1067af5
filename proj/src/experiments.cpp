#include "rnsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "rnsim/reference.hpp"
#include "rnsim/stream_keys.hpp"

namespace rnsim {

namespace {

using nlohmann::json;

enum : uint64_t {
  kDotprodSalt = 0x646f74,
  kAccuracySalt = 0x616363,
  kNoiseRateSalt = 0x6e7372,
  kNoiseEvalSalt = 0x6e7365,
  kPerrSalt = 0x70657272,
  kSubsetSalt = 0x737562,
};

std::string fmt_u64(uint64_t v) { return std::to_string(v); }
std::string fmt_i(int64_t v) { return std::to_string(v); }

}  // namespace

std::vector<uint32_t> sample_indices(uint64_t n, uint64_t count, uint64_t seed) {
  count = std::min(count, n);
  std::vector<uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  Rng rng(derive_stream(seed, {kSubsetSalt}));
  for (uint64_t i = 0; i < count; ++i) {
    const uint64_t j = i + rng.below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<uint64_t> redundant_extension(int bits, int count) {
  // Smallest integers above each preset that stay co-prime with it (and with
  // each other), so min(redundant) >= max(non-redundant) always holds.
  static const std::vector<std::pair<int, std::vector<uint64_t>>> extensions = {
      {4, {17, 19}}, {5, {37, 41}}, {6, {65, 67}}, {7, {131, 137}}, {8, {257, 259}},
  };
  for (const auto& [b, ext] : extensions) {
    if (b == bits) {
      if (count < 0 || count > static_cast<int>(ext.size())) {
        throw ConfigError("redundant_extension supports up to " +
                          std::to_string(ext.size()) + " extra moduli");
      }
      return {ext.begin(), ext.begin() + count};
    }
  }
  throw ConfigError("no redundant extension for " + std::to_string(bits) + " bits");
}

// ---------------------------------------------------------------------------

namespace {

struct DotprodTrialErrors {
  std::vector<double> rns;    // signed error vs float ground truth
  std::vector<double> fixed;
};

DotprodTrialErrors dotprod_trial_errors(int bits, int h, uint64_t trials,
                                        uint64_t seed) {
  const ModuliSet ms = make_moduli_set(preset_moduli(preset_for_bits(bits)));
  const int shift = required_output_bits(bits, bits, h) - bits;

  DotprodTrialErrors errs;
  errs.rns.resize(trials);
  errs.fixed.resize(trials);

  const auto count = static_cast<int64_t>(trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int64_t t = 0; t < count; ++t) {
    Rng rng(streams::trial(seed, kDotprodSalt, static_cast<uint64_t>(t)));
    std::vector<double> x(h), w(h);
    for (int j = 0; j < h; ++j) x[j] = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < h; ++j) w[j] = rng.uniform(-1.0, 1.0);

    double ground_truth = 0.0;
    for (int j = 0; j < h; ++j) ground_truth += x[j] * w[j];

    const QuantizedVector xq = quantize_input(x, bits);
    Matrix w_row(1, h);
    std::copy(w.begin(), w.end(), w_row.data.begin());
    const QuantizedMatrix wq = quantize_weights(w_row, bits);

    // RNS core: exact modular dot product, CRT, dequantize.
    const ResidueVector xr = ResidueVector::encode(xq.values, ms);
    const ResidueVector wr = ResidueVector::encode(wq.values, ms);
    const std::vector<uint32_t> dot_res = residue_dot_product(wr, xr);
    const int64_t rns_int = signed_decode(crt_reconstruct(dot_res, ms), ms);
    const std::vector<double> rns_out =
        dequantize_output(std::vector<int64_t>{rns_int}, xq.scale,
                          std::vector<double>{wq.row_scales[0]}, bits, bits);

    // Fixed-point core: exact integer dot product, keep the top bits only.
    int64_t exact = 0;
    for (int j = 0; j < h; ++j) {
      exact += static_cast<int64_t>(wq.values[j]) * xq.values[j];
    }
    const int64_t truncated = exact >> shift;
    const std::vector<double> fixed_out =
        dequantize_output(std::vector<int64_t>{truncated}, xq.scale,
                          std::vector<double>{wq.row_scales[0]}, bits, bits, shift);

    errs.rns[t] = rns_out[0] - ground_truth;
    errs.fixed[t] = fixed_out[0] - ground_truth;
  }
  return errs;
}

json dotprod_config_json(const DotprodErrorConfig& cfg) {
  return json{{"bits", cfg.bits}, {"h", cfg.h}, {"trials", cfg.trials},
              {"seed", cfg.seed}};
}

}  // namespace

std::vector<DotprodErrorStats> run_dotprod_error(const DotprodErrorConfig& cfg) {
  std::vector<DotprodErrorStats> stats;
  if (cfg.trials == 0) return stats;  // empty result, nothing to divide by
  for (const int b : cfg.bits) {
    const DotprodTrialErrors errs =
        dotprod_trial_errors(b, cfg.h, cfg.trials, derive_stream(cfg.seed, {kDotprodSalt, static_cast<uint64_t>(b)}));
    DotprodErrorStats s;
    s.bits = b;
    s.trials = cfg.trials;
    for (uint64_t t = 0; t < cfg.trials; ++t) {
      const double r = std::fabs(errs.rns[t]);
      const double f = std::fabs(errs.fixed[t]);
      s.rns_mean_abs += r;
      s.fixed_mean_abs += f;
      s.rns_max_abs = std::max(s.rns_max_abs, r);
      s.fixed_max_abs = std::max(s.fixed_max_abs, f);
    }
    s.rns_mean_abs /= static_cast<double>(cfg.trials);
    s.fixed_mean_abs /= static_cast<double>(cfg.trials);
    s.ratio = s.rns_mean_abs > 0.0 ? s.fixed_mean_abs / s.rns_mean_abs
                                   : std::numeric_limits<double>::infinity();
    stats.push_back(s);
  }
  return stats;
}

ExperimentResult dotprod_error_experiment(const DotprodErrorConfig& cfg) {
  ExperimentResult result;
  result.id = "dotprod-error";
  result.seed = cfg.seed;
  result.config_json = dotprod_config_json(cfg).dump();
  result.columns = {"b", "trials", "rns_mean_abs_err", "rns_max_abs_err",
                    "fixed_mean_abs_err", "fixed_max_abs_err", "ratio"};
  for (const DotprodErrorStats& s : run_dotprod_error(cfg)) {
    result.add_row({fmt_i(s.bits), fmt_u64(s.trials), format_double(s.rns_mean_abs),
                    format_double(s.rns_max_abs), format_double(s.fixed_mean_abs),
                    format_double(s.fixed_max_abs), format_double(s.ratio)});
  }
  return result;
}

ExperimentResult dotprod_error_histogram(const DotprodErrorConfig& cfg, int bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  ExperimentResult result;
  result.id = "dotprod-error-histogram";
  result.seed = cfg.seed;
  json j = dotprod_config_json(cfg);
  j["bins"] = bins;
  result.config_json = j.dump();
  result.columns = {"b", "core", "bin_lo", "bin_hi", "count"};
  if (cfg.trials == 0) return result;

  for (const int b : cfg.bits) {
    const DotprodTrialErrors errs =
        dotprod_trial_errors(b, cfg.h, cfg.trials, derive_stream(cfg.seed, {kDotprodSalt, static_cast<uint64_t>(b)}));
    double extent = 0.0;
    for (double e : errs.rns) extent = std::max(extent, std::fabs(e));
    for (double e : errs.fixed) extent = std::max(extent, std::fabs(e));
    if (extent == 0.0) extent = 1.0;
    const double width = 2.0 * extent / bins;

    const auto emit = [&](const char* core, const std::vector<double>& data) {
      std::vector<uint64_t> counts(bins, 0);
      for (double e : data) {
        int bin = static_cast<int>((e + extent) / width);
        bin = std::clamp(bin, 0, bins - 1);
        ++counts[bin];
      }
      for (int i = 0; i < bins; ++i) {
        result.add_row({fmt_i(b), core, format_double(-extent + i * width),
                        format_double(-extent + (i + 1) * width), fmt_u64(counts[i])});
      }
    };
    emit("rns", errs.rns);
    emit("fixed", errs.fixed);
  }
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult accuracy_sweep(const ModelSpec& model, const Dataset& ds,
                                const AccuracySweepConfig& cfg) {
  model.validate();
  ExperimentResult result;
  result.id = "accuracy";
  result.seed = cfg.seed;
  result.config_json =
      json{{"bits", cfg.bits}, {"hs", cfg.hs}, {"num_seeds", cfg.num_seeds},
           {"seed", cfg.seed}, {"eval_count", cfg.eval_count},
           {"include_rns", cfg.include_rns}, {"include_fixed", cfg.include_fixed},
           {"noise_p", cfg.noise_p}}
          .dump();
  result.columns = {"seed_index", "seed", "b", "h", "engine",
                    "correct", "total", "accuracy"};

  for (int s = 0; s < cfg.num_seeds; ++s) {
    const uint64_t run_seed = derive_stream(cfg.seed, {kAccuracySalt, static_cast<uint64_t>(s)});
    std::vector<uint32_t> indices;
    if (cfg.eval_count > 0) {
      indices = sample_indices(ds.size(), cfg.eval_count, run_seed);
    }
    const auto add = [&](int b, int h, const EngineConfig& engine) {
      const EvalResult eval = evaluate_dataset(model, ds, indices, engine, run_seed);
      result.add_row({fmt_i(s), fmt_u64(run_seed), fmt_i(b), fmt_i(h),
                      engine_name(engine.engine()), fmt_u64(eval.correct),
                      fmt_u64(eval.total), format_double(eval.accuracy())});
    };

    add(0, 0, EngineConfig::reference());
    for (const int b : cfg.bits) {
      for (const int h : cfg.hs) {
        if (cfg.include_rns) {
          NoiseModel noise;
          noise.p = cfg.noise_p;
          noise.seed = run_seed;
          add(b, h, EngineConfig::rns(b, h, noise));
        }
        if (cfg.include_fixed) {
          add(b, h, EngineConfig::fixed_point(b, h, b));
        }
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

NoiseSweepOutput run_noise_sweep(const ModelSpec& model, const Dataset& ds,
                                 const NoiseSweepConfig& cfg) {
  model.validate();
  const std::vector<uint64_t> base = preset_moduli(preset_for_bits(cfg.bits));

  NoiseSweepOutput out;
  out.bits = cfg.bits;
  out.h = cfg.h;
  out.n_base = static_cast<int>(base.size());

  std::vector<uint32_t> indices;
  if (cfg.eval_count > 0) {
    indices = sample_indices(ds.size(), cfg.eval_count, cfg.seed);
  }
  out.float_accuracy =
      evaluate_dataset(model, ds, indices, EngineConfig::reference(), cfg.seed)
          .accuracy();

  for (const int extra : cfg.extra_redundant) {
    std::vector<uint64_t> moduli = base;
    const std::vector<uint64_t> ext = redundant_extension(cfg.bits, extra);
    moduli.insert(moduli.end(), ext.begin(), ext.end());
    const RrnsCode code =
        RrnsCode::make(make_moduli_set(moduli), static_cast<int>(base.size()));

    for (const int attempts : cfg.attempts) {
      for (size_t pi = 0; pi < cfg.ps.size(); ++pi) {
        const double p = cfg.ps[pi];
        NoiseModel rate_noise;
        rate_noise.p = p;
        rate_noise.seed = derive_stream(cfg.seed, {kNoiseRateSalt,
                                                   static_cast<uint64_t>(extra), pi});
        const ErrorRates rates = estimate_rates(code, rate_noise, cfg.rate_trials);

        NoiseModel eval_noise;
        eval_noise.p = p;
        eval_noise.seed = derive_stream(cfg.seed, {kNoiseEvalSalt,
                                                   static_cast<uint64_t>(extra),
                                                   static_cast<uint64_t>(attempts), pi});
        const EngineConfig engine =
            EngineConfig::rrns(code, cfg.bits, cfg.h, eval_noise, attempts);
        const EvalResult eval = evaluate_dataset(model, ds, indices, engine, cfg.seed);

        NoiseSweepRow row;
        row.extra = extra;
        row.attempts = attempts;
        row.p = p;
        row.p_c = rates.p_c;
        row.p_d = rates.p_d;
        row.p_u = rates.p_u;
        row.p_err = p_err_retry(rates, attempts);
        row.accuracy = eval.accuracy();
        row.correct = eval.correct;
        row.total = eval.total;
        out.rows.push_back(row);
      }
    }
  }
  return out;
}

ExperimentResult NoiseSweepOutput::to_result(const NoiseSweepConfig& cfg) const {
  ExperimentResult result;
  result.id = "noise-sweep";
  result.seed = cfg.seed;
  result.config_json =
      json{{"bits", cfg.bits}, {"h", cfg.h}, {"extra_redundant", cfg.extra_redundant},
           {"ps", cfg.ps}, {"attempts", cfg.attempts}, {"eval_count", cfg.eval_count},
           {"rate_trials", cfg.rate_trials}, {"seed", cfg.seed}}
          .dump();
  result.columns = {"b", "h", "n", "k", "extra", "R", "p", "p_c", "p_d", "p_u",
                    "p_err_analytic", "accuracy", "float_accuracy", "correct", "total"};
  for (const NoiseSweepRow& r : rows) {
    result.add_row({fmt_i(bits), fmt_i(h), fmt_i(n_base + r.extra), fmt_i(n_base),
                    fmt_i(r.extra), fmt_i(r.attempts), format_double(r.p),
                    format_double(r.p_c), format_double(r.p_d), format_double(r.p_u),
                    format_double(r.p_err), format_double(r.accuracy),
                    format_double(float_accuracy), fmt_u64(r.correct),
                    fmt_u64(r.total)});
  }
  return result;
}

std::vector<NoiseCutoff> noise_sweep_cutoffs(const NoiseSweepOutput& out) {
  std::vector<NoiseCutoff> cutoffs;
  const double threshold = 0.99 * out.float_accuracy;
  // Rows are grouped by (extra, attempts) with p ascending within each group.
  for (size_t i = 0; i < out.rows.size();) {
    const int extra = out.rows[i].extra;
    const int attempts = out.rows[i].attempts;
    NoiseCutoff cut;
    cut.extra = extra;
    cut.attempts = attempts;
    for (; i < out.rows.size() && out.rows[i].extra == extra &&
           out.rows[i].attempts == attempts;
         ++i) {
      if (!cut.reached && out.rows[i].accuracy < threshold) {
        cut.reached = true;
        cut.p = out.rows[i].p;
        cut.p_err = out.rows[i].p_err;
      }
    }
    cutoffs.push_back(cut);
  }
  return cutoffs;
}

// ---------------------------------------------------------------------------

ExperimentResult rrns_perr_sweep(const RrnsPerrConfig& cfg) {
  if (cfg.moduli.empty() || cfg.k < 1) {
    throw ConfigError("rrns sweep needs a moduli list and k >= 1");
  }
  const ModuliSet ms = make_moduli_set(cfg.moduli);
  const RrnsCode code = RrnsCode::make(ms, cfg.k);

  ExperimentResult result;
  result.id = "rrns-perr";
  result.seed = cfg.seed;
  result.config_json = json{{"moduli", cfg.moduli}, {"k", cfg.k}, {"ps", cfg.ps},
                            {"attempts", cfg.attempts}, {"trials", cfg.trials},
                            {"seed", cfg.seed}}
                           .dump();
  result.columns = {"bit_width", "n", "k", "p", "R", "p_c", "p_d", "p_u",
                    "p_err_analytic", "p_err_empirical", "trials", "seed"};

  for (size_t pi = 0; pi < cfg.ps.size(); ++pi) {
    const double p = cfg.ps[pi];
    NoiseModel noise;
    noise.p = p;
    noise.seed = derive_stream(cfg.seed, {kPerrSalt, pi});
    const ErrorRates rates = estimate_rates(code, noise, cfg.trials);
    for (const int attempts : cfg.attempts) {
      NoiseModel sim_noise = noise;
      sim_noise.seed = derive_stream(cfg.seed, {kPerrSalt, pi, static_cast<uint64_t>(attempts)});
      const RetryResult sim = retry_protocol_simulate(code, sim_noise, attempts, cfg.trials);
      result.add_row({fmt_i(ms.bit_width()), fmt_i(code.n()), fmt_i(code.k()),
                      format_double(p), fmt_i(attempts), format_double(rates.p_c),
                      format_double(rates.p_d), format_double(rates.p_u),
                      format_double(p_err_retry(rates, attempts)),
                      format_double(sim.p_err()), fmt_u64(cfg.trials),
                      fmt_u64(cfg.seed)});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult energy_table(const EnergyTableConfig& cfg) {
  ExperimentResult result;
  result.id = "energy";
  result.seed = 0;
  result.config_json =
      json{{"bits", cfg.bits}, {"h", cfg.h}, {"c_unit", cfg.params.c_unit},
           {"v_dd", cfg.params.v_dd}, {"k1", cfg.params.k1}, {"k2", cfg.params.k2}}
          .dump();
  result.columns = {"b", "mode", "n", "b_adc_effective", "dac_J", "adc_J", "ratio"};

  for (const int b : cfg.bits) {
    const CoreConfig rns_cfg = CoreConfig::rns_preset(b, static_cast<int>(cfg.h));
    const CoreConfig fixed_cfg = CoreConfig::fixed_point(
        static_cast<int>(cfg.h), b, b, required_output_bits(b, b, cfg.h));
    const ConversionEnergy rns_e = core_conversion_energy(rns_cfg, cfg.params);
    const ConversionEnergy fixed_e = core_conversion_energy(fixed_cfg, cfg.params);
    const double ratio = fixed_e.adc_j / rns_e.adc_j;

    result.add_row({fmt_i(b), "rns", fmt_i(rns_e.conversions), fmt_i(rns_e.adc_enob),
                    format_double(rns_e.dac_j), format_double(rns_e.adc_j),
                    format_double(ratio)});
    result.add_row({fmt_i(b), "fixed", fmt_i(fixed_e.conversions),
                    fmt_i(fixed_e.adc_enob), format_double(fixed_e.dac_j),
                    format_double(fixed_e.adc_j), format_double(ratio)});
  }
  return result;
}

}  // namespace rnsim

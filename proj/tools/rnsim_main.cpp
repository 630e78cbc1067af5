// rnsim: command-line front end for the RNS analog-core simulator.
//
// Subcommands: convert, dotprod-error, accuracy, rrns-perr, energy, infer.
// Every experiment accepts --config <file.json>; explicit flags override
// config values, and RNSIM_CONFIG names a default config file. Exit codes:
// 0 success, 2 configuration error, 3 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "rnsim/csv.hpp"
#include "rnsim/experiments.hpp"
#include "rnsim/model.hpp"
#include "rnsim/reference.hpp"

using nlohmann::json;
using namespace rnsim;

namespace {

// ---------------------------------------------------------------------------
// List parsing: "4..8" ranges and comma-separated values.

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t pos = s.find(',', start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& part : split_list(s)) {
    const size_t dots = part.find("..");
    try {
      if (dots != std::string::npos) {
        const int lo = std::stoi(part.substr(0, dots));
        const int hi = std::stoi(part.substr(dots + 2));
        if (hi < lo) throw ConfigError("empty range: " + part);
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoi(part));
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("cannot parse integer list element: '" + part + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError("integer list element out of range: '" + part + "'");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : split_list(s)) {
    try {
      out.push_back(std::stod(part));
    } catch (...) {
      throw ConfigError("cannot parse number list element: '" + part + "'");
    }
  }
  return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& s) {
  std::vector<uint64_t> out;
  for (const std::string& part : split_list(s)) {
    try {
      out.push_back(std::stoull(part));
    } catch (...) {
      throw ConfigError("cannot parse moduli list element: '" + part + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config file layering: flags win, then config values, then defaults.

class ConfigFile {
 public:
  ConfigFile() : values_(json::object()) {}

  void load(const std::string& path, const std::set<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    try {
      in >> values_;
    } catch (const json::exception& e) {
      throw ConfigError("malformed config file " + path + ": " + e.what());
    }
    if (!values_.is_object()) {
      throw ConfigError("config file must contain a JSON object");
    }
    for (const auto& [key, value] : values_.items()) {
      if (!allowed.contains(key)) {
        throw ConfigError("unknown config key: " + key);
      }
    }
  }

  template <typename T>
  void apply(const CLI::Option* flag, const char* key, T& target) const {
    if (flag != nullptr && flag->count() > 0) return;  // flag wins
    if (!values_.contains(key)) return;
    try {
      target = values_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
  }

  /// List-valued keys may be JSON arrays or the CLI's comma/range strings.
  void apply_list(const CLI::Option* flag, const char* key,
                  std::string& target) const {
    if (flag != nullptr && flag->count() > 0) return;
    if (!values_.contains(key)) return;
    const json& v = values_.at(key);
    if (v.is_string()) {
      target = v.get<std::string>();
      return;
    }
    if (v.is_array()) {
      std::string joined;
      for (const json& e : v) {
        if (!joined.empty()) joined += ",";
        if (e.is_number_integer()) {
          joined += std::to_string(e.get<int64_t>());
        } else if (e.is_number()) {
          joined += format_double(e.get<double>());
        } else {
          throw ConfigError(std::string("config key '") + key +
                            "' must list numbers");
        }
      }
      target = joined;
      return;
    }
    if (v.is_number_integer()) {
      target = std::to_string(v.get<int64_t>());
      return;
    }
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }

 private:
  json values_;
};

struct CommonOpts {
  std::string config_path;
  int jobs = 0;
  CLI::Option* config_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

CommonOpts add_common(CLI::App* cmd) {
  CommonOpts opts;
  opts.config_opt =
      cmd->add_option("--config", opts.config_path,
                      "JSON config file (flags override; RNSIM_CONFIG sets a default)");
  opts.jobs_opt = cmd->add_option("--jobs", opts.jobs,
                                  "Worker thread cap (0 = hardware default)");
  return opts;
}

// Loads --config / RNSIM_CONFIG, enforcing the allowed key set.
ConfigFile resolve_config(const CommonOpts& opts, std::set<std::string> allowed) {
  allowed.insert("jobs");
  allowed.insert("seed");
  allowed.insert("out");
  ConfigFile cfg;
  std::string path = opts.config_path;
  if (path.empty() && opts.config_opt->count() == 0) {
    if (const char* env = std::getenv("RNSIM_CONFIG")) path = env;
  }
  if (!path.empty()) cfg.load(path, allowed);
  return cfg;
}

void apply_jobs(const ConfigFile& cfg, CommonOpts& opts) {
  cfg.apply(opts.jobs_opt, "jobs", opts.jobs);
  if (opts.jobs < 0) throw ConfigError("--jobs must be >= 0");
#ifdef _OPENMP
  if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
#endif
}

std::vector<uint64_t> resolve_moduli(const std::string& moduli_csv,
                                     const std::string& preset) {
  if (!moduli_csv.empty() && !preset.empty()) {
    throw ConfigError("give either --moduli or --preset, not both");
  }
  if (!moduli_csv.empty()) return parse_u64_list(moduli_csv);
  if (!preset.empty()) return preset_moduli(preset);
  throw ConfigError("a moduli list or preset is required");
}

ModelSpec load_model_file(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  return load_model(TensorFile::read(path));
}

Dataset load_dataset_file(const std::string& path) {
  if (path.empty()) throw ConfigError("--data is required");
  return load_dataset(TensorFile::read(path));
}

// ---------------------------------------------------------------------------

int cmd_convert(const std::string& moduli_csv, const std::string& preset,
                int64_t value) {
  const ModuliSet ms = make_moduli_set(resolve_moduli(moduli_csv, preset));
  const std::vector<uint32_t> residues = forward_convert(value, ms);
  std::cout << "residues: ";
  for (size_t i = 0; i < residues.size(); ++i) {
    std::cout << (i ? "," : "") << residues[i];
  }
  const int64_t back = signed_decode(crt_reconstruct(residues, ms), ms);
  std::cout << "; reconstructed: " << back << "\n";
  return back == value ? 0 : 1;
}

int cmd_dotprod_error(const DotprodErrorConfig& cfg, const std::string& out,
                      const std::string& hist_out, int hist_bins) {
  const ExperimentResult result = dotprod_error_experiment(cfg);
  save_csv(result, out);
  if (!hist_out.empty()) {
    save_csv(dotprod_error_histogram(cfg, hist_bins), hist_out);
  }
  std::cout << "wrote " << out << "\n";
  for (const DotprodErrorStats& s : run_dotprod_error(cfg)) {
    std::cout << "b=" << s.bits << " rns_mean=" << format_double(s.rns_mean_abs)
              << " fixed_mean=" << format_double(s.fixed_mean_abs)
              << " ratio=" << format_double(s.ratio) << "\n";
  }
  return 0;
}

int cmd_accuracy(const ModelSpec& model, const Dataset& ds,
                 const AccuracySweepConfig& cfg, const std::string& out) {
  const ExperimentResult result = accuracy_sweep(model, ds, cfg);
  save_csv(result, out);
  std::cout << "wrote " << out << "\n";
  for (const auto& row : result.rows) {
    std::cout << "seed=" << row[0] << " b=" << row[2] << " h=" << row[3] << " "
              << row[4] << " accuracy=" << row[7] << "\n";
  }
  return 0;
}

int cmd_rrns_perr(const RrnsPerrConfig& cfg, const std::string& out,
                  const std::string& model_path, const std::string& data_path,
                  const NoiseSweepConfig& sweep_cfg, const std::string& sweep_out) {
  const ExperimentResult result = rrns_perr_sweep(cfg);
  save_csv(result, out);
  std::cout << "wrote " << out << "\n";
  for (const auto& row : result.rows) {
    std::cout << "p=" << row[3] << " R=" << row[4] << " p_err_analytic=" << row[8]
              << " p_err_empirical=" << row[9] << "\n";
  }

  // With a model and data set, also sweep inference accuracy under noise with
  // RRNS protection and report where it falls off.
  if (!model_path.empty() || !data_path.empty()) {
    const ModelSpec model = load_model_file(model_path);
    const Dataset ds = load_dataset_file(data_path);
    const NoiseSweepOutput sweep = run_noise_sweep(model, ds, sweep_cfg);
    save_csv(sweep.to_result(sweep_cfg), sweep_out);
    std::cout << "wrote " << sweep_out << "\n";
    std::cout << "float_accuracy=" << format_double(sweep.float_accuracy) << "\n";
    for (const NoiseCutoff& cut : noise_sweep_cutoffs(sweep)) {
      std::cout << "extra=" << cut.extra << " R=" << cut.attempts;
      if (cut.reached) {
        std::cout << " accuracy_cutoff_p=" << format_double(cut.p)
                  << " cutoff_p_err=" << format_double(cut.p_err) << "\n";
      } else {
        std::cout << " accuracy never dropped below 0.99 x float\n";
      }
    }
  }
  return 0;
}

int cmd_energy(const EnergyTableConfig& cfg, const std::string& out) {
  const ExperimentResult result = energy_table(cfg);
  save_csv(result, out);
  std::cout << "wrote " << out << "\n";
  for (const int b : cfg.bits) {
    std::cout << "b=" << b
              << " ratio=" << format_double(efficiency_ratio(b, cfg.h, cfg.params))
              << "\n";
  }
  return 0;
}

struct InferOpts {
  std::string engine = "float";
  int bits = 8;
  int h = 128;
  int b_adc = 0;  // fixed point; 0 = same as bits
  double p = 0.0;
  int attempts = 1;
  int extra = 2;
  uint64_t eval_count = 0;
  uint64_t seed = kDefaultSeed;
};

int cmd_infer(const ModelSpec& model, const Dataset& ds, const InferOpts& opts,
              const std::string& out) {
  NoiseModel noise;
  noise.p = opts.p;
  noise.seed = opts.seed;

  EngineConfig engine = EngineConfig::reference();
  switch (engine_from_name(opts.engine)) {
    case Engine::reference:
      break;
    case Engine::rns:
      engine = EngineConfig::rns(opts.bits, opts.h, noise);
      break;
    case Engine::fixed_point:
      engine = EngineConfig::fixed_point(opts.bits, opts.h,
                                         opts.b_adc > 0 ? opts.b_adc : opts.bits);
      break;
    case Engine::rrns: {
      std::vector<uint64_t> moduli = preset_moduli(preset_for_bits(opts.bits));
      const int k = static_cast<int>(moduli.size());
      const auto ext = redundant_extension(opts.bits, opts.extra);
      moduli.insert(moduli.end(), ext.begin(), ext.end());
      const RrnsCode code = RrnsCode::make(make_moduli_set(moduli), k);
      engine = EngineConfig::rrns(code, opts.bits, opts.h, noise, opts.attempts);
      break;
    }
  }

  std::vector<uint32_t> indices;
  if (opts.eval_count > 0) {
    indices = sample_indices(ds.size(), opts.eval_count, opts.seed);
  }
  const EvalResult eval = evaluate_dataset(model, ds, indices, engine, opts.seed);
  std::cout << "engine=" << opts.engine << " b=" << opts.bits << " h=" << opts.h
            << " p=" << format_double(opts.p) << " correct=" << eval.correct << "/"
            << eval.total << " accuracy=" << format_double(eval.accuracy()) << "\n";

  if (!out.empty()) {
    ExperimentResult result;
    result.id = "infer";
    result.seed = opts.seed;
    result.config_json = json{{"engine", opts.engine}, {"b", opts.bits},
                              {"h", opts.h}, {"p", opts.p},
                              {"attempts", opts.attempts},
                              {"eval_count", opts.eval_count}}
                             .dump();
    result.columns = {"sample", "label", "correct"};
    for (size_t i = 0; i < eval.per_sample.size(); ++i) {
      const uint32_t sample =
          indices.empty() ? static_cast<uint32_t>(i) : indices[i];
      result.add_row({std::to_string(sample), std::to_string(ds.labels[sample]),
                      std::to_string(static_cast<int>(eval.per_sample[i]))});
    }
    save_csv(result, out);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RNS-based analog GEMM core simulator"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print help and exit");

  const auto add_subcommand = [&app](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", "Print help and exit");  // keep -h free for --h
    return cmd;
  };

  // ---- convert ----
  auto* convert = add_subcommand("convert", "Residue round trip for one value");
  int64_t convert_value = 0;
  std::string convert_moduli, convert_preset;
  convert->add_option("value", convert_value, "Signed integer to encode")->required();
  convert->add_option("--moduli", convert_moduli, "Comma-separated moduli, e.g. 3,5,7");
  convert->add_option("--preset", convert_preset, "Named moduli preset (rns4..rns8)");

  // ---- dotprod-error ----
  auto* dotprod = add_subcommand(
      "dotprod-error", "Dot-product error of both cores vs float ground truth");
  CommonOpts dp_common = add_common(dotprod);
  std::string dp_bits = "4..8";
  DotprodErrorConfig dp_cfg;
  std::string dp_out = "dotprod_error.csv", dp_hist;
  int dp_hist_bins = 64;
  auto* dp_bits_opt = dotprod->add_option("--b", dp_bits, "Bit widths, e.g. 4..8 or 4,6,8");
  auto* dp_h_opt = dotprod->add_option("--h", dp_cfg.h, "Vector length per dot product");
  auto* dp_trials_opt = dotprod->add_option("--trials", dp_cfg.trials, "Random vector pairs");
  auto* dp_seed_opt = dotprod->add_option("--seed", dp_cfg.seed, "Experiment seed");
  auto* dp_out_opt = dotprod->add_option("--out", dp_out, "Summary CSV path");
  auto* dp_hist_opt = dotprod->add_option("--hist", dp_hist, "Also write histogram CSV here");
  auto* dp_hist_bins_opt = dotprod->add_option("--hist-bins", dp_hist_bins, "Histogram buckets");

  // ---- accuracy ----
  auto* accuracy = add_subcommand(
      "accuracy", "Classification accuracy over a (b, h) grid for both cores");
  CommonOpts acc_common = add_common(accuracy);
  std::string acc_model, acc_data, acc_bits = "4", acc_hs = "16,64,128",
              acc_engines = "rns,fixed", acc_out = "accuracy.csv";
  AccuracySweepConfig acc_cfg;
  auto* acc_model_opt = accuracy->add_option("--model", acc_model, "Model tensor file");
  auto* acc_data_opt = accuracy->add_option("--data", acc_data, "Dataset tensor file");
  auto* acc_bits_opt = accuracy->add_option("--b", acc_bits, "Bit widths");
  auto* acc_hs_opt = accuracy->add_option("--h", acc_hs, "Tile sizes");
  auto* acc_seeds_opt = accuracy->add_option("--seeds", acc_cfg.num_seeds, "Evaluation seeds");
  auto* acc_eval_opt = accuracy->add_option("--eval-count", acc_cfg.eval_count,
                                            "Samples per seed (0 = all)");
  auto* acc_engines_opt = accuracy->add_option("--engines", acc_engines,
                                               "Cores to sweep: rns,fixed");
  auto* acc_noise_opt = accuracy->add_option("--noise-p", acc_cfg.noise_p,
                                             "RNS output residue error probability");
  auto* acc_seed_opt = accuracy->add_option("--seed", acc_cfg.seed, "Experiment seed");
  auto* acc_out_opt = accuracy->add_option("--out", acc_out, "CSV path");

  // ---- rrns-perr ----
  auto* rrns = add_subcommand(
      "rrns-perr", "RRNS output error probability; optionally accuracy under noise");
  CommonOpts rr_common = add_common(rrns);
  std::string rr_moduli, rr_preset, rr_ps = "0.01,0.05,0.1", rr_attempts = "1,2,3,5,10";
  std::string rr_out = "rrns_perr.csv", rr_model, rr_data, rr_sweep_out = "noise_sweep.csv";
  std::string rr_sweep_extra = "0,1,2";
  int rr_k = 0, rr_extra = 0;
  RrnsPerrConfig rr_cfg;
  NoiseSweepConfig rr_sweep;
  auto* rr_moduli_opt = rrns->add_option("--moduli", rr_moduli, "Full moduli list");
  auto* rr_preset_opt = rrns->add_option("--preset", rr_preset, "Base preset (rns4..rns8)");
  auto* rr_extra_opt = rrns->add_option("--extra", rr_extra,
                                        "Redundant moduli appended to the preset");
  auto* rr_k_opt = rrns->add_option("--k", rr_k, "Non-redundant moduli count");
  auto* rr_ps_opt = rrns->add_option("--p", rr_ps, "Residue error probabilities");
  auto* rr_attempts_opt = rrns->add_option("--attempts", rr_attempts, "Retry budgets");
  auto* rr_trials_opt = rrns->add_option("--trials", rr_cfg.trials, "Monte Carlo trials");
  auto* rr_seed_opt = rrns->add_option("--seed", rr_cfg.seed, "Experiment seed");
  auto* rr_out_opt = rrns->add_option("--out", rr_out, "CSV path");
  auto* rr_model_opt = rrns->add_option("--model", rr_model, "Model for the accuracy sweep");
  auto* rr_data_opt = rrns->add_option("--data", rr_data, "Dataset for the accuracy sweep");
  auto* rr_sweep_out_opt = rrns->add_option("--sweep-out", rr_sweep_out,
                                            "Accuracy sweep CSV path");
  auto* rr_sweep_extra_opt = rrns->add_option("--sweep-extra", rr_sweep_extra,
                                              "Redundancy counts for the accuracy sweep");
  auto* rr_sweep_b_opt = rrns->add_option("--sweep-b", rr_sweep.bits,
                                          "Bit width for the accuracy sweep");
  auto* rr_sweep_h_opt = rrns->add_option("--sweep-h", rr_sweep.h,
                                          "Tile size for the accuracy sweep");
  auto* rr_sweep_eval_opt = rrns->add_option("--sweep-eval-count", rr_sweep.eval_count,
                                             "Accuracy sweep samples (0 = all)");

  // ---- energy ----
  auto* energy = add_subcommand("energy", "Converter energy table and ratios");
  CommonOpts en_common = add_common(energy);
  std::string en_bits = "4..8", en_preset, en_out = "energy.csv";
  EnergyTableConfig en_cfg;
  auto* en_bits_opt = energy->add_option("--b", en_bits, "Bit widths");
  auto* en_preset_opt = energy->add_option("--preset", en_preset,
                                           "Moduli preset (selects its bit width)");
  auto* en_h_opt = energy->add_option("--h", en_cfg.h, "Dot-product length");
  auto* en_cu_opt = energy->add_option("--c-unit", en_cfg.params.c_unit,
                                       "DAC unit capacitance (F)");
  auto* en_vdd_opt = energy->add_option("--v-dd", en_cfg.params.v_dd, "Supply voltage (V)");
  auto* en_k1_opt = energy->add_option("--k1", en_cfg.params.k1, "ADC linear coefficient (J)");
  auto* en_k2_opt = energy->add_option("--k2", en_cfg.params.k2,
                                       "ADC exponential coefficient (J)");
  auto* en_out_opt = energy->add_option("--out", en_out, "CSV path");

  // ---- infer ----
  auto* infer = add_subcommand("infer", "Run a model on a dataset with one engine");
  CommonOpts in_common = add_common(infer);
  std::string in_model, in_data, in_out;
  InferOpts in_opts;
  auto* in_model_opt = infer->add_option("--model", in_model, "Model tensor file");
  auto* in_data_opt = infer->add_option("--data", in_data, "Dataset tensor file");
  auto* in_engine_opt = infer->add_option("--engine", in_opts.engine,
                                          "float, rns, fixed, or rrns");
  auto* in_b_opt = infer->add_option("--b", in_opts.bits, "Bit width");
  auto* in_h_opt = infer->add_option("--h", in_opts.h, "Tile size");
  auto* in_badc_opt = infer->add_option("--b-adc", in_opts.b_adc,
                                        "Fixed-point ADC bits (default: b)");
  auto* in_p_opt = infer->add_option("--p", in_opts.p, "Residue error probability");
  auto* in_attempts_opt = infer->add_option("--attempts", in_opts.attempts, "RRNS retries");
  auto* in_extra_opt = infer->add_option("--extra", in_opts.extra, "RRNS redundant moduli");
  auto* in_eval_opt = infer->add_option("--eval-count", in_opts.eval_count,
                                        "Samples (0 = all)");
  auto* in_seed_opt = infer->add_option("--seed", in_opts.seed, "Seed");
  auto* in_out_opt = infer->add_option("--out", in_out, "Optional per-sample CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (convert->parsed()) {
      return cmd_convert(convert_moduli, convert_preset, convert_value);
    }

    if (dotprod->parsed()) {
      ConfigFile cfg = resolve_config(
          dp_common, {"bits", "h", "trials", "hist", "hist_bins"});
      std::string bits_str = dp_bits;
      cfg.apply_list(dp_bits_opt, "bits", bits_str);
      cfg.apply(dp_h_opt, "h", dp_cfg.h);
      cfg.apply(dp_trials_opt, "trials", dp_cfg.trials);
      cfg.apply(dp_seed_opt, "seed", dp_cfg.seed);
      cfg.apply(dp_out_opt, "out", dp_out);
      cfg.apply(dp_hist_opt, "hist", dp_hist);
      cfg.apply(dp_hist_bins_opt, "hist_bins", dp_hist_bins);
      apply_jobs(cfg, dp_common);
      dp_cfg.bits = parse_int_list(bits_str);
      return cmd_dotprod_error(dp_cfg, dp_out, dp_hist, dp_hist_bins);
    }

    if (accuracy->parsed()) {
      ConfigFile cfg = resolve_config(
          acc_common, {"model", "data", "bits", "hs", "seeds", "eval_count",
                       "engines", "noise_p"});
      std::string bits_str = acc_bits, hs_str = acc_hs, engines_str = acc_engines;
      cfg.apply(acc_model_opt, "model", acc_model);
      cfg.apply(acc_data_opt, "data", acc_data);
      cfg.apply_list(acc_bits_opt, "bits", bits_str);
      cfg.apply_list(acc_hs_opt, "hs", hs_str);
      cfg.apply(acc_seeds_opt, "seeds", acc_cfg.num_seeds);
      cfg.apply(acc_eval_opt, "eval_count", acc_cfg.eval_count);
      cfg.apply(acc_engines_opt, "engines", engines_str);
      cfg.apply(acc_noise_opt, "noise_p", acc_cfg.noise_p);
      cfg.apply(acc_seed_opt, "seed", acc_cfg.seed);
      cfg.apply(acc_out_opt, "out", acc_out);
      apply_jobs(cfg, acc_common);
      acc_cfg.bits = parse_int_list(bits_str);
      acc_cfg.hs = parse_int_list(hs_str);
      acc_cfg.include_rns = engines_str.find("rns") != std::string::npos;
      acc_cfg.include_fixed = engines_str.find("fixed") != std::string::npos;
      return cmd_accuracy(load_model_file(acc_model), load_dataset_file(acc_data),
                          acc_cfg, acc_out);
    }

    if (rrns->parsed()) {
      ConfigFile cfg = resolve_config(
          rr_common, {"moduli", "preset", "extra", "k", "ps", "attempts", "trials",
                      "model", "data", "sweep_out", "sweep_extra", "sweep_b",
                      "sweep_h", "sweep_eval_count"});
      std::string ps_str = rr_ps, attempts_str = rr_attempts, sweep_extra_str = rr_sweep_extra;
      cfg.apply_list(rr_moduli_opt, "moduli", rr_moduli);
      cfg.apply(rr_preset_opt, "preset", rr_preset);
      cfg.apply(rr_extra_opt, "extra", rr_extra);
      cfg.apply(rr_k_opt, "k", rr_k);
      cfg.apply_list(rr_ps_opt, "ps", ps_str);
      cfg.apply_list(rr_attempts_opt, "attempts", attempts_str);
      cfg.apply(rr_trials_opt, "trials", rr_cfg.trials);
      cfg.apply(rr_seed_opt, "seed", rr_cfg.seed);
      cfg.apply(rr_out_opt, "out", rr_out);
      cfg.apply(rr_model_opt, "model", rr_model);
      cfg.apply(rr_data_opt, "data", rr_data);
      cfg.apply(rr_sweep_out_opt, "sweep_out", rr_sweep_out);
      cfg.apply_list(rr_sweep_extra_opt, "sweep_extra", sweep_extra_str);
      cfg.apply(rr_sweep_b_opt, "sweep_b", rr_sweep.bits);
      cfg.apply(rr_sweep_h_opt, "sweep_h", rr_sweep.h);
      cfg.apply(rr_sweep_eval_opt, "sweep_eval_count", rr_sweep.eval_count);
      apply_jobs(cfg, rr_common);

      if (!rr_preset.empty()) {
        if (!rr_moduli.empty()) {
          throw ConfigError("give either --moduli or --preset, not both");
        }
        rr_cfg.moduli = preset_moduli(rr_preset);
        if (rr_k == 0) rr_k = static_cast<int>(rr_cfg.moduli.size());
        const int base_bits = make_moduli_set(rr_cfg.moduli).bit_width();
        const auto ext = redundant_extension(base_bits, rr_extra);
        rr_cfg.moduli.insert(rr_cfg.moduli.end(), ext.begin(), ext.end());
      } else {
        rr_cfg.moduli = resolve_moduli(rr_moduli, rr_preset);
        if (rr_k == 0) {
          throw ConfigError("--k is required with an explicit moduli list");
        }
      }
      rr_cfg.k = rr_k;
      rr_cfg.ps = parse_double_list(ps_str);
      rr_cfg.attempts = parse_int_list(attempts_str);
      rr_sweep.extra_redundant = parse_int_list(sweep_extra_str);
      rr_sweep.ps = rr_cfg.ps;
      rr_sweep.attempts = rr_cfg.attempts;
      rr_sweep.seed = rr_cfg.seed;
      return cmd_rrns_perr(rr_cfg, rr_out, rr_model, rr_data, rr_sweep, rr_sweep_out);
    }

    if (energy->parsed()) {
      ConfigFile cfg = resolve_config(en_common, {"bits", "preset", "h", "c_unit",
                                                  "v_dd", "k1", "k2"});
      std::string bits_str = en_bits, preset_str = en_preset;
      cfg.apply_list(en_bits_opt, "bits", bits_str);
      cfg.apply(en_preset_opt, "preset", preset_str);
      cfg.apply(en_h_opt, "h", en_cfg.h);
      cfg.apply(en_cu_opt, "c_unit", en_cfg.params.c_unit);
      cfg.apply(en_vdd_opt, "v_dd", en_cfg.params.v_dd);
      cfg.apply(en_k1_opt, "k1", en_cfg.params.k1);
      cfg.apply(en_k2_opt, "k2", en_cfg.params.k2);
      cfg.apply(en_out_opt, "out", en_out);
      apply_jobs(cfg, en_common);
      if (!preset_str.empty()) {
        en_cfg.bits = {make_moduli_set(preset_moduli(preset_str)).bit_width()};
      } else {
        en_cfg.bits = parse_int_list(bits_str);
      }
      return cmd_energy(en_cfg, en_out);
    }

    if (infer->parsed()) {
      ConfigFile cfg = resolve_config(
          in_common, {"model", "data", "engine", "b", "h", "b_adc", "p", "attempts",
                      "extra", "eval_count"});
      cfg.apply(in_model_opt, "model", in_model);
      cfg.apply(in_data_opt, "data", in_data);
      cfg.apply(in_engine_opt, "engine", in_opts.engine);
      cfg.apply(in_b_opt, "b", in_opts.bits);
      cfg.apply(in_h_opt, "h", in_opts.h);
      cfg.apply(in_badc_opt, "b_adc", in_opts.b_adc);
      cfg.apply(in_p_opt, "p", in_opts.p);
      cfg.apply(in_attempts_opt, "attempts", in_opts.attempts);
      cfg.apply(in_extra_opt, "extra", in_opts.extra);
      cfg.apply(in_eval_opt, "eval_count", in_opts.eval_count);
      cfg.apply(in_seed_opt, "seed", in_opts.seed);
      cfg.apply(in_out_opt, "out", in_out);
      apply_jobs(cfg, in_common);
      return cmd_infer(load_model_file(in_model), load_dataset_file(in_data), in_opts,
                       in_out);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

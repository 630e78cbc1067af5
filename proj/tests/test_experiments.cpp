#include <doctest.h>

#include <sstream>

#include "rnsim/experiments.hpp"

using namespace rnsim;

namespace {

// Three well-separated class prototypes and a matched-template classifier,
// so the float path classifies perfectly and noise effects are visible.
ModelSpec tiny_model() {
  Matrix w0(3, 6);
  for (int cls = 0; cls < 3; ++cls) {
    w0.at(cls, 2 * cls) = 1.0;
    w0.at(cls, 2 * cls + 1) = 0.5;
    w0.at(cls, (2 * cls + 3) % 6) = -0.5;
  }
  ModelSpec model;
  model.layers.push_back(DenseLayer{w0, Activation::softmax});
  return model;
}

Dataset tiny_dataset(size_t n) {
  Dataset ds;
  ds.images = Matrix(n, 6);
  Rng rng(0xdead);
  for (size_t s = 0; s < n; ++s) {
    const int cls = static_cast<int>(rng.below(3));
    for (size_t c = 0; c < 6; ++c) ds.images.at(s, c) = rng.uniform(0.0, 0.15);
    ds.images.at(s, 2 * cls) += 1.0;
    ds.images.at(s, 2 * cls + 1) += 0.5;
    ds.labels.push_back(cls);
  }
  return ds;
}

std::string csv_string(const ExperimentResult& r) {
  std::ostringstream ss;
  write_csv(r, ss);
  return ss.str();
}

}  // namespace

TEST_CASE("dot-product error experiment") {
  SUBCASE("zero trials give an empty result") {
    DotprodErrorConfig cfg;
    cfg.trials = 0;
    CHECK(run_dotprod_error(cfg).empty());
    CHECK(dotprod_error_experiment(cfg).rows.empty());
  }
  SUBCASE("fixed-point error dominates at every width") {
    DotprodErrorConfig cfg;
    cfg.trials = 300;
    cfg.h = 128;
    const auto stats = run_dotprod_error(cfg);
    REQUIRE(stats.size() == 5);
    for (const auto& s : stats) {
      CHECK(s.fixed_mean_abs > s.rns_mean_abs);
      CHECK(s.ratio > 1.0);
      // Noiseless rns never exceeds the quantization bound: each product is
      // off by at most one step per operand; 2h steps is a generous cap.
      const double step = 1.0 / quant_limit(s.bits);
      CHECK(s.rns_max_abs <= 2.0 * cfg.h * step);
    }
  }
  SUBCASE("byte-identical reruns") {
    DotprodErrorConfig cfg;
    cfg.trials = 100;
    cfg.bits = {4, 6};
    CHECK(csv_string(dotprod_error_experiment(cfg)) ==
          csv_string(dotprod_error_experiment(cfg)));
  }
  SUBCASE("histogram counts total to trials") {
    DotprodErrorConfig cfg;
    cfg.trials = 200;
    cfg.bits = {5};
    const ExperimentResult hist = dotprod_error_histogram(cfg, 16);
    uint64_t rns_total = 0, fixed_total = 0;
    for (const auto& row : hist.rows) {
      const uint64_t count = std::stoull(row[4]);
      if (row[1] == "rns") rns_total += count;
      if (row[1] == "fixed") fixed_total += count;
    }
    CHECK(rns_total == 200);
    CHECK(fixed_total == 200);
  }
}

TEST_CASE("accuracy sweep shape and determinism") {
  const ModelSpec model = tiny_model();
  const Dataset ds = tiny_dataset(40);
  AccuracySweepConfig cfg;
  cfg.bits = {4};
  cfg.hs = {4, 8};
  cfg.num_seeds = 2;
  cfg.eval_count = 20;
  const ExperimentResult r = accuracy_sweep(model, ds, cfg);
  // Per seed: one float row plus (rns + fixed) per (b, h).
  CHECK(r.rows.size() == 2 * (1 + 2 * 2));
  CHECK(csv_string(r) == csv_string(accuracy_sweep(model, ds, cfg)));
}

TEST_CASE("noise sweep cutoffs") {
  const ModelSpec model = tiny_model();
  const Dataset ds = tiny_dataset(30);
  NoiseSweepConfig cfg;
  cfg.bits = 4;
  cfg.h = 8;
  cfg.extra_redundant = {2};
  cfg.ps = {0.0, 0.9};
  cfg.attempts = {1};
  cfg.eval_count = 20;
  cfg.rate_trials = 2000;
  const NoiseSweepOutput out = run_noise_sweep(model, ds, cfg);
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0].accuracy >= out.rows[1].accuracy);
  CHECK(out.rows[0].p_err < out.rows[1].p_err);

  const auto cutoffs = noise_sweep_cutoffs(out);
  REQUIRE(cutoffs.size() == 1);
  // Accuracy at p = 0.9 collapses, so the cutoff must trigger there.
  CHECK(cutoffs[0].reached);
  CHECK(cutoffs[0].p == 0.9);
}

TEST_CASE("rrns perr sweep") {
  RrnsPerrConfig cfg;
  cfg.moduli = {15, 14, 13, 11};
  cfg.k = 2;
  cfg.trials = 3000;
  SUBCASE("p = 0 rows report zero error everywhere") {
    cfg.ps = {0.0};
    cfg.attempts = {1, 2};
    const ExperimentResult r = rrns_perr_sweep(cfg);
    REQUIRE(r.rows.size() == 2);
    for (const auto& row : r.rows) {
      CHECK(row[8] == "0");  // p_err_analytic
      CHECK(row[9] == "0");  // p_err_empirical
    }
  }
  SUBCASE("columns match the documented schema") {
    cfg.ps = {0.05};
    cfg.attempts = {1};
    const ExperimentResult r = rrns_perr_sweep(cfg);
    const std::vector<std::string> expect = {
        "bit_width", "n", "k", "p", "R", "p_c", "p_d", "p_u",
        "p_err_analytic", "p_err_empirical", "trials", "seed"};
    CHECK(r.columns == expect);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0][0] == "4");
    CHECK(r.rows[0][1] == "4");
    CHECK(r.rows[0][2] == "2");
  }
}

TEST_CASE("energy table") {
  EnergyTableConfig cfg;
  const ExperimentResult r = energy_table(cfg);
  CHECK(r.rows.size() == 10);  // rns + fixed per width
  // b = 4 rows carry the headline ratio.
  CHECK(std::stod(r.rows[0][6]) == doctest::Approx(168.5).epsilon(0.01));
  // b = 8 rows carry the large one.
  CHECK(std::stod(r.rows[8][6]) == doctest::Approx(6.775e6).epsilon(0.01));
}

TEST_CASE("redundant extensions are valid for every preset") {
  for (int bits = 4; bits <= 8; ++bits) {
    std::vector<uint64_t> moduli = preset_moduli(preset_for_bits(bits));
    const uint64_t base_max = *std::max_element(moduli.begin(), moduli.end());
    const auto ext = redundant_extension(bits, 2);
    REQUIRE(ext.size() == 2);
    for (uint64_t m : ext) CHECK(m >= base_max);
    moduli.insert(moduli.end(), ext.begin(), ext.end());
    CHECK_NOTHROW(make_moduli_set(moduli));  // co-primality holds
  }
}

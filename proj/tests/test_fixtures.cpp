#include <doctest.h>

#include <cstdlib>
#include <optional>

#include "rnsim/experiments.hpp"
#include "rnsim/model.hpp"

// Tests against the bundled toy digit fixtures. The runner exports RNSIM_DATA;
// without it these cases are skipped.

using namespace rnsim;

namespace {

struct Fixtures {
  ModelSpec model;
  Dataset data;
};

std::optional<Fixtures> load_fixtures() {
  const char* dir = std::getenv("RNSIM_DATA");
  if (!dir) return std::nullopt;
  Fixtures f;
  f.model = load_model(TensorFile::read(std::string(dir) + "/toy_mlp.rnst"));
  f.data = load_dataset(TensorFile::read(std::string(dir) + "/toy_digits.rnst"));
  return f;
}

}  // namespace

TEST_CASE("bundled fixtures load and have the expected shape") {
  const auto f = load_fixtures();
  if (!f) return;
  REQUIRE(f->model.layers.size() == 2);
  const auto& l0 = std::get<DenseLayer>(f->model.layers[0]);
  const auto& l1 = std::get<DenseLayer>(f->model.layers[1]);
  CHECK(l0.weights.cols == 64);
  CHECK(l0.act == Activation::relu);
  CHECK(l1.weights.rows == 10);
  CHECK(l1.act == Activation::softmax);
  CHECK(f->data.size() == 360);
  CHECK(f->data.images.cols == 64);
}

TEST_CASE("float baseline accuracy is frozen") {
  const auto f = load_fixtures();
  if (!f) return;
  const EvalResult eval =
      evaluate_dataset(f->model, f->data, {}, EngineConfig::reference(), 1);
  CHECK(eval.correct == 354);  // 0.9833 on 360 samples
}

TEST_CASE("noiseless rns at b=8 matches the float argmax on >= 99% of samples") {
  const auto f = load_fixtures();
  if (!f) return;
  const EngineConfig rns = EngineConfig::rns(8, 128);
  const EngineConfig ref = EngineConfig::reference();
  size_t agree = 0;
  for (size_t s = 0; s < f->data.size(); ++s) {
    const std::span<const double> x(f->data.images.row(s), f->data.images.cols);
    const auto a = run_network(f->model, x, ref);
    const auto b = run_network(f->model, x, rns);
    agree += argmax(a) == argmax(b);
  }
  CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(f->data.size()));
}

TEST_CASE("noise sweep on the toy model shows the protection trends") {
  const auto f = load_fixtures();
  if (!f) return;

  NoiseSweepConfig cfg;
  cfg.bits = 6;
  cfg.h = 128;
  cfg.extra_redundant = {0, 2};
  cfg.ps = {0.0, 0.01, 0.05};
  cfg.attempts = {1, 4};
  cfg.eval_count = 60;
  cfg.rate_trials = 10000;
  cfg.seed = 99;
  const NoiseSweepOutput out = run_noise_sweep(f->model, f->data, cfg);
  REQUIRE(out.rows.size() == 2 * 2 * 3);

  // p = 0 equals the noiseless rns accuracy exactly.
  const auto indices = sample_indices(f->data.size(), cfg.eval_count, cfg.seed);
  const double noiseless =
      evaluate_dataset(f->model, f->data, indices, EngineConfig::rns(6, 128), cfg.seed)
          .accuracy();
  double acc_r1 = 0.0, acc_r4 = 0.0, acc_e0 = 0.0, acc_e2 = 0.0;
  for (const NoiseSweepRow& row : out.rows) {
    if (row.p == 0.0) CHECK(row.accuracy == noiseless);
    if (row.attempts == 1) acc_r1 += row.accuracy;
    if (row.attempts == 4) acc_r4 += row.accuracy;
    if (row.extra == 0) acc_e0 += row.accuracy;
    if (row.extra == 2) acc_e2 += row.accuracy;
  }
  // More retries and more redundancy do not hurt on average.
  CHECK(acc_r4 >= acc_r1 - 1e-9);
  CHECK(acc_e2 >= acc_e0 - 1e-9);

  // Accuracy is non-increasing in p for the strongest configuration.
  std::vector<double> strongest;
  for (const NoiseSweepRow& row : out.rows) {
    if (row.extra == 2 && row.attempts == 4) strongest.push_back(row.accuracy);
  }
  REQUIRE(strongest.size() == 3);
  CHECK(strongest[0] >= strongest[1]);
  CHECK(strongest[1] >= strongest[2]);

  // Cutoffs are exported for every (extra, attempts) combination.
  CHECK(noise_sweep_cutoffs(out).size() == 4);
}

TEST_CASE("lossless adc makes both cores match float within quantization error") {
  const auto f = load_fixtures();
  if (!f) return;
  // b_adc = b_out: the fixed-point core drops nothing, so both cores reduce
  // to exact integer arithmetic and only quantization noise remains.
  const int h = 16;
  const int bits = 8;
  const int b_out = required_output_bits(bits, bits, h);
  const EngineConfig fixed = EngineConfig::fixed_point(bits, h, b_out);
  const EngineConfig rns = EngineConfig::rns(bits, h);
  const EngineConfig ref = EngineConfig::reference();
  for (size_t s = 0; s < 20; ++s) {
    const std::span<const double> x(f->data.images.row(s), f->data.images.cols);
    const auto exact = run_network(f->model, x, ref);
    const auto a = run_network(f->model, x, fixed);
    const auto b = run_network(f->model, x, rns);
    for (size_t i = 0; i < exact.size(); ++i) {
      CHECK(a[i] == b[i]);  // identical integer paths
    }
  }
}

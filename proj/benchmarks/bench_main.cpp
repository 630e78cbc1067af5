// Benchmark comparing the OpenMP kernels against the serial naive-modulo
// reference implementations. Both paths share RNG substreams, so results are
// cross-checked for exact equality while timing.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rnsim/analog_core.hpp"
#include "rnsim/experiments.hpp"
#include "rnsim/reference.hpp"
#include "rnsim/rng.hpp"
#include "rnsim/rrns.hpp"

using namespace rnsim;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void print_row(const char* name, double serial_s, double parallel_s, bool equal) {
  std::printf("%-28s %10.3f ms %10.3f ms %7.2fx   %s\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s, equal ? "match" : "MISMATCH");
}

void bench_tile_mvm() {
  const int h = 128;
  const int batch = 64;
  const CoreConfig cfg = CoreConfig::rns_preset(8, h);
  NoiseModel noise;
  noise.p = 0.001;
  noise.seed = 42;

  Rng rng(1);
  std::vector<QuantizedMatrix> ws(batch);
  std::vector<QuantizedVector> xs(batch);
  for (int t = 0; t < batch; ++t) {
    ws[t].rows = ws[t].cols = h;
    ws[t].bits = 8;
    ws[t].row_scales.assign(h, 1.0);
    ws[t].values.resize(h * h);
    for (auto& v : ws[t].values) v = static_cast<int32_t>(rng.below(255)) - 127;
    xs[t].bits = 8;
    xs[t].scale = 1.0;
    xs[t].values.resize(h);
    for (auto& v : xs[t].values) v = static_cast<int32_t>(rng.below(255)) - 127;
  }

  auto start = std::chrono::steady_clock::now();
  std::vector<ResidueVector> slow;
  slow.reserve(batch);
  for (int t = 0; t < batch; ++t) {
    slow.push_back(ref::rns_tile_mvm(ws[t], xs[t], cfg, noise, t));
  }
  const double serial_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  std::vector<ResidueVector> fast;
  fast.reserve(batch);
  for (int t = 0; t < batch; ++t) {
    fast.push_back(rns_tile_mvm(ws[t], xs[t], cfg, noise, t));
  }
  const double parallel_s = seconds_since(start);

  bool equal = true;
  for (int t = 0; t < batch && equal; ++t) {
    for (size_t i = 0; i < slow[t].moduli().size() && equal; ++i) {
      equal = std::equal(slow[t].channel(i).begin(), slow[t].channel(i).end(),
                         fast[t].channel(i).begin());
    }
  }
  print_row("rns_tile_mvm (128x128 x64)", serial_s, parallel_s, equal);
}

void bench_estimate_rates() {
  const RrnsCode code = RrnsCode::make(make_moduli_set({15, 14, 13, 11}), 2);
  NoiseModel noise;
  noise.p = 0.05;
  noise.seed = 7;
  const uint64_t trials = 200000;

  auto start = std::chrono::steady_clock::now();
  const ErrorRates slow = ref::estimate_rates(code, noise, trials);
  const double serial_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const ErrorRates fast = estimate_rates(code, noise, trials);
  const double parallel_s = seconds_since(start);

  const bool equal =
      slow.n_c == fast.n_c && slow.n_d == fast.n_d && slow.n_u == fast.n_u;
  print_row("estimate_rates (2e5 trials)", serial_s, parallel_s, equal);
}

void bench_crt() {
  const ModuliSet ms = make_moduli_set({255, 254, 253});
  const uint64_t n = 2000000;
  Rng rng(3);
  std::vector<std::vector<uint32_t>> inputs(n / 100);
  for (auto& r : inputs) {
    r = forward_convert(signed_decode(rng.below(ms.product()), ms), ms);
  }

  // Barrett-based reconstruction vs the naive remainder reference.
  auto start = std::chrono::steady_clock::now();
  uint64_t sink_slow = 0;
  for (uint64_t i = 0; i < n; ++i) {
    sink_slow ^= ref::crt_reconstruct(inputs[i % inputs.size()], ms);
  }
  const double serial_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  uint64_t sink_fast = 0;
  for (uint64_t i = 0; i < n; ++i) {
    sink_fast ^= crt_reconstruct(inputs[i % inputs.size()], ms);
  }
  const double parallel_s = seconds_since(start);

  print_row("crt_reconstruct (2e6)", serial_s, parallel_s, sink_slow == sink_fast);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "optimized", "speedup");
  bench_tile_mvm();
  bench_estimate_rates();
  bench_crt();
  return 0;
}

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rnsim/analog_core.hpp"
#include "rnsim/matrix.hpp"
#include "rnsim/rrns.hpp"
#include "rnsim/tensor_file.hpp"

namespace rnsim {

enum class Activation { identity, relu, softmax };

/// Dense layer computing f(W * x).
struct DenseLayer {
  Matrix weights;  // (out, in)
  Activation act = Activation::identity;
};

/// Convolution lowered to GEMM through im2col; stride 1 expected to cover the
/// common toy cases, padding optional.
struct ConvLayer {
  std::vector<double> weights;  // (out_ch, in_ch, kh, kw) row-major
  int out_ch = 0, in_ch = 0, kh = 0, kw = 0;
  int in_h = 0, in_w = 0;
  int stride = 1, pad = 0;
  Activation act = Activation::identity;

  int out_h() const { return (in_h + 2 * pad - kh) / stride + 1; }
  int out_w() const { return (in_w + 2 * pad - kw) / stride + 1; }
};

using Layer = std::variant<DenseLayer, ConvLayer>;

struct ModelSpec {
  std::vector<Layer> layers;

  void validate() const;  // shape chaining + finite weights
};

/// Loads a model from a tensor container. Tensor names follow
/// "<index>:dense:<activation>" for 2-D weights and
/// "<index>:conv:<activation>:<in_h>x<in_w>" for 4-D weights.
ModelSpec load_model(const TensorFile& tf);

/// Labeled vectors: "images" (N x d) and "labels" (N).
struct Dataset {
  Matrix images;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
};

Dataset load_dataset(const TensorFile& tf);

/// Which simulated engine executes the GEMMs.
enum class Engine { reference, rns, fixed_point, rrns };

std::string engine_name(Engine e);
Engine engine_from_name(std::string_view name);

/// Fully resolved execution configuration for the harness.
class EngineConfig {
 public:
  /// Pure floating-point execution (the accuracy baseline).
  static EngineConfig reference();

  /// Noiseless or noisy RNS core at the preset moduli for `bits`.
  static EngineConfig rns(int bits, int h, NoiseModel noise = {});
  static EngineConfig rns_custom(ModuliSet ms, int bits, int h, NoiseModel noise = {});

  /// Truncating fixed-point core.
  static EngineConfig fixed_point(int bits, int h, int b_adc);

  /// RRNS-protected RNS core with up to `attempts` retries per output.
  static EngineConfig rrns(RrnsCode code, int bits, int h, NoiseModel noise,
                           int attempts);

  Engine engine() const { return engine_; }
  int h() const { return h_; }
  int b_in() const { return b_in_; }
  int b_w() const { return b_w_; }
  const NoiseModel& noise() const { return noise_; }
  const CoreConfig& core() const { return core_; }
  const RrnsCode& code() const { return *code_; }
  int attempts() const { return attempts_; }

 private:
  EngineConfig() = default;

  Engine engine_ = Engine::reference;
  int h_ = 0;
  int b_in_ = 0;
  int b_w_ = 0;
  CoreConfig core_;
  std::optional<RrnsCode> code_;
  int attempts_ = 1;
  NoiseModel noise_;
};

/// Tiled GEMM: W is split into h x h tiles and x into h-element chunks (zero
/// padded at the edges), each tile is quantized with its own scales and run on
/// the configured core, and the dequantized partial outputs are accumulated in
/// floating point. stream_key isolates the noise substreams of this call.
std::vector<double> tiled_gemm(const Matrix& w, std::span<const double> x,
                               const EngineConfig& cfg, uint64_t stream_key = 0);

/// Full forward pass; nonlinearities run in floating point.
std::vector<double> run_network(const ModelSpec& model, std::span<const double> input,
                                const EngineConfig& cfg, uint64_t stream_key = 0);

/// Deterministic first-maximum argmax.
size_t argmax(std::span<const double> values);

struct EvalResult {
  uint64_t correct = 0;
  uint64_t total = 0;
  std::vector<uint8_t> per_sample;

  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

/// Classifies the listed samples (all samples when indices is empty); noise
/// substreams are derived per sample, so results do not depend on the
/// parallel schedule.
EvalResult evaluate_dataset(const ModelSpec& model, const Dataset& ds,
                            std::span<const uint32_t> indices,
                            const EngineConfig& cfg, uint64_t seed);

}  // namespace rnsim

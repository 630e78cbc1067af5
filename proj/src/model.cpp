#include "rnsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rnsim/reference.hpp"
#include "rnsim/stream_keys.hpp"

namespace rnsim {

namespace {

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "softmax") return Activation::softmax;
  throw ConfigError("unknown activation: " + name);
}

void apply_activation(std::vector<double>& v, Activation act) {
  switch (act) {
    case Activation::identity:
      return;
    case Activation::relu:
      for (double& x : v) x = std::max(0.0, x);
      return;
    case Activation::softmax: {
      const double m = *std::max_element(v.begin(), v.end());
      double sum = 0.0;
      for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
      }
      for (double& x : v) x /= sum;
      return;
    }
  }
}

size_t layer_input_size(const Layer& layer) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return d->weights.cols;
  const auto& c = std::get<ConvLayer>(layer);
  return static_cast<size_t>(c.in_ch) * c.in_h * c.in_w;
}

size_t layer_output_size(const Layer& layer) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return d->weights.rows;
  const auto& c = std::get<ConvLayer>(layer);
  return static_cast<size_t>(c.out_ch) * c.out_h() * c.out_w();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void ModelSpec::validate() const {
  if (layers.empty()) throw ShapeError("model has no layers");
  for (size_t l = 0; l < layers.size(); ++l) {
    if (const auto* d = std::get_if<DenseLayer>(&layers[l])) {
      if (d->weights.rows == 0 || d->weights.cols == 0) {
        throw ShapeError("dense layer " + std::to_string(l) + " has empty weights");
      }
      for (double w : d->weights.data) {
        if (!std::isfinite(w)) {
          throw NonFiniteError("non-finite weight in layer " + std::to_string(l));
        }
      }
    } else {
      const auto& c = std::get<ConvLayer>(layers[l]);
      if (c.out_ch < 1 || c.in_ch < 1 || c.kh < 1 || c.kw < 1 || c.stride < 1 ||
          c.pad < 0 || c.in_h < c.kh - 2 * c.pad || c.in_w < c.kw - 2 * c.pad) {
        throw ShapeError("conv layer " + std::to_string(l) + " has invalid geometry");
      }
      for (double w : c.weights) {
        if (!std::isfinite(w)) {
          throw NonFiniteError("non-finite weight in layer " + std::to_string(l));
        }
      }
    }
    if (l + 1 < layers.size() &&
        layer_output_size(layers[l]) != layer_input_size(layers[l + 1])) {
      throw ShapeError("layer " + std::to_string(l) + " output size does not feed layer " +
                       std::to_string(l + 1));
    }
  }
}

ModelSpec load_model(const TensorFile& tf) {
  struct Parsed {
    int index;
    Layer layer;
  };
  std::vector<Parsed> parsed;
  for (const Tensor& t : tf.tensors()) {
    const auto parts = split(t.name, ':');
    if (parts.size() < 2) continue;  // not a layer tensor
    int index = 0;
    try {
      index = std::stoi(parts[0]);
    } catch (...) {
      continue;
    }
    if (parts[1] == "dense") {
      if (parts.size() != 3 || t.shape.size() != 2) {
        throw ShapeError("dense layer tensor '" + t.name + "' is malformed");
      }
      DenseLayer d;
      d.weights = t.as_matrix();
      d.act = activation_from_name(parts[2]);
      parsed.push_back({index, Layer{std::move(d)}});
    } else if (parts[1] == "conv") {
      if (parts.size() != 4 || t.shape.size() != 4) {
        throw ShapeError("conv layer tensor '" + t.name + "' is malformed");
      }
      const auto dims = split(parts[3], 'x');
      if (dims.size() != 2) {
        throw ShapeError("conv layer tensor '" + t.name + "' needs <in_h>x<in_w>");
      }
      ConvLayer c;
      c.out_ch = static_cast<int>(t.shape[0]);
      c.in_ch = static_cast<int>(t.shape[1]);
      c.kh = static_cast<int>(t.shape[2]);
      c.kw = static_cast<int>(t.shape[3]);
      c.in_h = std::stoi(dims[0]);
      c.in_w = std::stoi(dims[1]);
      c.act = activation_from_name(parts[2]);
      c.weights.assign(t.data.begin(), t.data.end());
      parsed.push_back({index, Layer{std::move(c)}});
    }
  }
  if (parsed.empty()) throw ShapeError("tensor file contains no layer tensors");
  std::sort(parsed.begin(), parsed.end(),
            [](const Parsed& a, const Parsed& b) { return a.index < b.index; });
  ModelSpec model;
  for (size_t l = 0; l < parsed.size(); ++l) {
    if (parsed[l].index != static_cast<int>(l)) {
      throw ShapeError("layer indices are not contiguous from 0");
    }
    model.layers.push_back(std::move(parsed[l].layer));
  }
  model.validate();
  return model;
}

Dataset load_dataset(const TensorFile& tf) {
  Dataset ds;
  ds.images = tf.require("images").as_matrix();
  const Tensor& labels = tf.require("labels");
  if (labels.element_count() != ds.images.rows) {
    throw ShapeError("label count does not match image count");
  }
  ds.labels.reserve(labels.data.size());
  for (float l : labels.data) {
    ds.labels.push_back(static_cast<int>(std::lround(l)));
  }
  return ds;
}

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::reference: return "float";
    case Engine::rns: return "rns";
    case Engine::fixed_point: return "fixed";
    case Engine::rrns: return "rrns";
  }
  return "unknown";
}

Engine engine_from_name(std::string_view name) {
  if (name == "float") return Engine::reference;
  if (name == "rns") return Engine::rns;
  if (name == "fixed") return Engine::fixed_point;
  if (name == "rrns") return Engine::rrns;
  throw ConfigError("unknown engine: " + std::string(name) +
                    " (expected float, rns, fixed, or rrns)");
}

EngineConfig EngineConfig::reference() {
  EngineConfig cfg;
  cfg.engine_ = Engine::reference;
  return cfg;
}

EngineConfig EngineConfig::rns(int bits, int h, NoiseModel noise) {
  return rns_custom(make_moduli_set(preset_moduli(preset_for_bits(bits))), bits, h,
                    noise);
}

EngineConfig EngineConfig::rns_custom(ModuliSet ms, int bits, int h, NoiseModel noise) {
  EngineConfig cfg;
  cfg.engine_ = Engine::rns;
  cfg.h_ = h;
  cfg.b_in_ = bits;
  cfg.b_w_ = bits;
  cfg.core_ = CoreConfig::rns(std::move(ms), h, bits, bits);
  cfg.noise_ = noise;
  return cfg;
}

EngineConfig EngineConfig::fixed_point(int bits, int h, int b_adc) {
  EngineConfig cfg;
  cfg.engine_ = Engine::fixed_point;
  cfg.h_ = h;
  cfg.b_in_ = bits;
  cfg.b_w_ = bits;
  cfg.core_ = CoreConfig::fixed_point(h, bits, bits, b_adc);
  return cfg;
}

EngineConfig EngineConfig::rrns(RrnsCode code, int bits, int h, NoiseModel noise,
                                int attempts) {
  if (attempts < 1) throw ConfigError("rrns engine needs attempts >= 1");
  EngineConfig cfg;
  cfg.engine_ = Engine::rrns;
  cfg.h_ = h;
  cfg.b_in_ = bits;
  cfg.b_w_ = bits;
  cfg.noise_ = noise;
  cfg.attempts_ = attempts;
  cfg.core_ = CoreConfig::rns(code.moduli(), h, bits, bits);
  // Outputs are bias-shifted into [0, 2^b_out), so the legitimate range must
  // hold the full b_out bits, not just the nonnegative half.
  const int b_out = required_output_bits(bits, bits, h);
  if (b_out >= 63 || code.legitimate_range() < (1ull << b_out)) {
    throw RangeViolationError("rrns legitimate range " +
                              std::to_string(code.legitimate_range()) +
                              " cannot hold a " + std::to_string(b_out) +
                              "-bit output");
  }
  cfg.code_ = std::move(code);
  return cfg;
}

namespace {

// RRNS output path for one tile: exact residues, bias shift into the
// legitimate range (modular accumulation leaves negative dot products
// congruent to v + M, which no group agrees on), then per-element
// corrupt / vote / retry.
std::vector<int64_t> rrns_tile_decode(const QuantizedMatrix& wq,
                                      const QuantizedVector& xq,
                                      const EngineConfig& cfg, uint64_t tile_key) {
  const RrnsCode& code = cfg.code();
  const ModuliSet& ms = code.moduli();
  const NoiseModel clean{};
  const ResidueVector exact = rns_tile_mvm(wq, xq, cfg.core(), clean, 0);

  const int64_t bias = int64_t{1} << (cfg.core().output_bits() - 1);
  std::vector<uint32_t> bias_res(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    bias_res[i] = static_cast<uint32_t>(static_cast<uint64_t>(bias) % ms.modulus(i));
  }

  const size_t h = xq.size();
  std::vector<int64_t> out(h);
  std::vector<uint32_t> codeword(ms.size());
  for (size_t k = 0; k < h; ++k) {
    for (size_t i = 0; i < ms.size(); ++i) {
      codeword[i] = static_cast<uint32_t>(
          (exact.channel(i)[k] + bias_res[i]) % ms.modulus(i));
    }
    VoteOutcome outcome;
    for (int attempt = 0; attempt < cfg.attempts(); ++attempt) {
      std::vector<uint32_t> noisy = codeword;
      Rng rng(streams::rrns_element(cfg.noise().seed, tile_key, k,
                                    static_cast<uint64_t>(attempt)));
      corrupt_codeword(noisy, ms, cfg.noise().p, rng);
      outcome = vote_decode(noisy, code);
      if (outcome.corrected) break;  // cases 1/3; case 2 retries
    }
    out[k] = static_cast<int64_t>(outcome.value) - bias;
  }
  return out;
}

}  // namespace

std::vector<double> tiled_gemm(const Matrix& w, std::span<const double> x,
                               const EngineConfig& cfg, uint64_t stream_key) {
  if (w.cols != x.size()) {
    throw DimensionMismatchError("tiled_gemm: matrix has " + std::to_string(w.cols) +
                                 " columns, input has " + std::to_string(x.size()));
  }
  if (cfg.engine() == Engine::reference) {
    return ref::mvm_double(w, x);
  }

  const auto h = static_cast<size_t>(cfg.h());
  const size_t row_tiles = (w.rows + h - 1) / h;
  const size_t col_tiles = (w.cols + h - 1) / h;
  std::vector<double> out(w.rows, 0.0);
  Matrix tile(h, h);
  std::vector<double> chunk(h);

  for (size_t tr = 0; tr < row_tiles; ++tr) {
    const size_t rows_here = std::min(h, w.rows - tr * h);
    for (size_t tc = 0; tc < col_tiles; ++tc) {
      const size_t cols_here = std::min(h, w.cols - tc * h);

      // Extract the tile and input chunk, zero padding the edges.
      std::fill(tile.data.begin(), tile.data.end(), 0.0);
      for (size_t r = 0; r < rows_here; ++r) {
        const double* src = w.row(tr * h + r) + tc * h;
        std::copy(src, src + cols_here, tile.data.data() + r * h);
      }
      std::fill(chunk.begin(), chunk.end(), 0.0);
      std::copy(x.begin() + static_cast<ptrdiff_t>(tc * h),
                x.begin() + static_cast<ptrdiff_t>(tc * h + cols_here), chunk.begin());

      const QuantizedVector xq = quantize_input(chunk, cfg.b_in());
      const QuantizedMatrix wq = quantize_weights(tile, cfg.b_w());
      const uint64_t tile_key = streams::gemm_tile(stream_key, tr, tc);

      std::vector<double> partial;
      switch (cfg.engine()) {
        case Engine::rns: {
          const ResidueVector rv = rns_tile_mvm(wq, xq, cfg.core(), cfg.noise(), tile_key);
          partial = dequantize_output(rv.decode_signed(), xq.scale, wq.row_scales,
                                      cfg.b_in(), cfg.b_w());
          break;
        }
        case Engine::fixed_point: {
          const TruncatedMvm t = fixed_point_tile_mvm(wq, xq, cfg.core());
          partial = dequantize_output(t.values, xq.scale, wq.row_scales, cfg.b_in(),
                                      cfg.b_w(), t.shift);
          break;
        }
        case Engine::rrns: {
          partial = dequantize_output(rrns_tile_decode(wq, xq, cfg, tile_key), xq.scale,
                                      wq.row_scales, cfg.b_in(), cfg.b_w());
          break;
        }
        default:
          throw ConfigError("unsupported engine in tiled_gemm");
      }

      // Partial outputs leave the core per tile and accumulate digitally.
      for (size_t r = 0; r < rows_here; ++r) {
        out[tr * h + r] += partial[r];
      }
    }
  }
  return out;
}

namespace {

std::vector<double> conv_forward(const ConvLayer& c, std::span<const double> input,
                                 const EngineConfig& cfg, uint64_t layer_key) {
  const size_t expected = static_cast<size_t>(c.in_ch) * c.in_h * c.in_w;
  if (input.size() != expected) {
    throw ShapeError("conv input size " + std::to_string(input.size()) +
                     " does not match declared " + std::to_string(expected));
  }
  const int oh = c.out_h();
  const int ow = c.out_w();
  const int patch = c.in_ch * c.kh * c.kw;

  // im2col: the kernel bank becomes a (out_ch x patch) GEMM operand.
  Matrix w_gemm(c.out_ch, patch);
  std::copy(c.weights.begin(), c.weights.end(), w_gemm.data.begin());

  std::vector<double> out(static_cast<size_t>(c.out_ch) * oh * ow, 0.0);
  std::vector<double> column(patch, 0.0);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      size_t idx = 0;
      for (int ic = 0; ic < c.in_ch; ++ic) {
        for (int ky = 0; ky < c.kh; ++ky) {
          for (int kx = 0; kx < c.kw; ++kx, ++idx) {
            const int iy = oy * c.stride + ky - c.pad;
            const int ix = ox * c.stride + kx - c.pad;
            const bool inside = iy >= 0 && iy < c.in_h && ix >= 0 && ix < c.in_w;
            column[idx] = inside
                              ? input[(static_cast<size_t>(ic) * c.in_h + iy) * c.in_w + ix]
                              : 0.0;
          }
        }
      }
      const uint64_t pos_key = derive_stream(layer_key, {static_cast<uint64_t>(oy),
                                                         static_cast<uint64_t>(ox)});
      const std::vector<double> col_out = tiled_gemm(w_gemm, column, cfg, pos_key);
      for (int oc = 0; oc < c.out_ch; ++oc) {
        out[(static_cast<size_t>(oc) * oh + oy) * ow + ox] = col_out[oc];
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> run_network(const ModelSpec& model, std::span<const double> input,
                                const EngineConfig& cfg, uint64_t stream_key) {
  std::vector<double> cur(input.begin(), input.end());
  for (size_t l = 0; l < model.layers.size(); ++l) {
    const uint64_t layer_key = streams::layer(stream_key, l);
    Activation act;
    if (const auto* d = std::get_if<DenseLayer>(&model.layers[l])) {
      cur = tiled_gemm(d->weights, cur, cfg, layer_key);
      act = d->act;
    } else {
      const auto& c = std::get<ConvLayer>(model.layers[l]);
      cur = conv_forward(c, cur, cfg, layer_key);
      act = c.act;
    }
    apply_activation(cur, act);
  }
  return cur;
}

size_t argmax(std::span<const double> values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

EvalResult evaluate_dataset(const ModelSpec& model, const Dataset& ds,
                            std::span<const uint32_t> indices,
                            const EngineConfig& cfg, uint64_t seed) {
  std::vector<uint32_t> all;
  if (indices.empty()) {
    all.resize(ds.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<uint32_t>(i);
    indices = all;
  }

  EvalResult result;
  result.total = indices.size();
  result.per_sample.assign(indices.size(), 0);

  const auto count = static_cast<int64_t>(indices.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int64_t i = 0; i < count; ++i) {
    const uint32_t sample = indices[i];
    const std::span<const double> x(ds.images.row(sample), ds.images.cols);
    const std::vector<double> logits =
        run_network(model, x, cfg, streams::sample(seed, sample));
    result.per_sample[i] =
        static_cast<uint8_t>(argmax(logits) == static_cast<size_t>(ds.labels[sample]));
  }
  for (uint8_t f : result.per_sample) result.correct += f;
  return result;
}

}  // namespace rnsim

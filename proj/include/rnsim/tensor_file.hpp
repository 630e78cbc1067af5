#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rnsim/errors.hpp"
#include "rnsim/matrix.hpp"

namespace rnsim {

/// Named float32 tensor with a row-major payload.
struct Tensor {
  std::string name;
  std::vector<uint32_t> shape;
  std::vector<float> data;

  size_t element_count() const {
    size_t n = 1;
    for (uint32_t d : shape) n *= d;
    return n;
  }

  Matrix as_matrix() const;
};

/// Self-describing binary tensor container.
///
/// Layout (all integers little-endian):
///   magic "RNST" | u32 version (= 1) | u32 tensor_count
///   per tensor: u32 name_len | name bytes | u32 ndim | u32 dims[ndim]
///               | float32 data[prod(dims)]
class TensorFile {
 public:
  static constexpr char kMagic[4] = {'R', 'N', 'S', 'T'};
  static constexpr uint32_t kVersion = 1;

  static TensorFile read(const std::string& path);
  void write(const std::string& path) const;

  const Tensor* find(std::string_view name) const;
  const Tensor& require(std::string_view name) const;

  void add(Tensor t) { tensors_.push_back(std::move(t)); }
  const std::vector<Tensor>& tensors() const { return tensors_; }

 private:
  std::vector<Tensor> tensors_;
};

}  // namespace rnsim

#include "rnsim/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace rnsim {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

uint32_t to_le(uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap32(v);
  }
  return v;
}

uint32_t read_u32(std::istream& in, const std::string& what) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError("truncated tensor file while reading " + what);
  return to_le(v);
}

void write_u32(std::ostream& out, uint32_t v) {
  const uint32_t le = to_le(v);
  out.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

float to_le_float(float f) {
  if constexpr (std::endian::native == std::endian::big) {
    uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    bits = __builtin_bswap32(bits);
    std::memcpy(&f, &bits, sizeof(bits));
  }
  return f;
}

constexpr size_t kMaxElements = 1u << 28;  // 1 GiB of float32 payload

}  // namespace

Matrix Tensor::as_matrix() const {
  if (shape.size() != 2) {
    throw ShapeError("tensor '" + name + "' is not 2-D");
  }
  Matrix m(shape[0], shape[1]);
  for (size_t i = 0; i < data.size(); ++i) {
    m.data[i] = static_cast<double>(data[i]);
  }
  return m;
}

TensorFile TensorFile::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file: " + path);

  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("bad magic in tensor file: " + path);
  }
  const uint32_t version = read_u32(in, "version");
  if (version != kVersion) {
    throw IoError("unsupported tensor file version " + std::to_string(version));
  }

  TensorFile tf;
  const uint32_t count = read_u32(in, "tensor count");
  for (uint32_t t = 0; t < count; ++t) {
    Tensor tensor;
    const uint32_t name_len = read_u32(in, "name length");
    if (name_len > 4096) throw IoError("unreasonable tensor name length");
    tensor.name.resize(name_len);
    in.read(tensor.name.data(), name_len);
    if (!in) throw IoError("truncated tensor file while reading a name");

    const uint32_t ndim = read_u32(in, "rank");
    if (ndim > 8) throw IoError("unreasonable tensor rank");
    size_t elements = 1;
    tensor.shape.resize(ndim);
    for (uint32_t d = 0; d < ndim; ++d) {
      tensor.shape[d] = read_u32(in, "dimension");
      elements *= tensor.shape[d];
      if (elements > kMaxElements) throw IoError("tensor payload too large");
    }

    tensor.data.resize(elements);
    in.read(reinterpret_cast<char*>(tensor.data.data()),
            static_cast<std::streamsize>(elements * sizeof(float)));
    if (!in) throw IoError("truncated tensor payload for '" + tensor.name + "'");
    for (float& f : tensor.data) f = to_le_float(f);
    tf.tensors_.push_back(std::move(tensor));
  }
  return tf;
}

void TensorFile::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create tensor file: " + path);

  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(tensors_.size()));
  for (const Tensor& t : tensors_) {
    write_u32(out, static_cast<uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_u32(out, static_cast<uint32_t>(t.shape.size()));
    size_t elements = 1;
    for (uint32_t d : t.shape) {
      write_u32(out, d);
      elements *= d;
    }
    if (elements != t.data.size()) {
      throw ShapeError("tensor '" + t.name + "' shape does not match its payload");
    }
    for (float f : t.data) {
      const float le = to_le_float(f);
      out.write(reinterpret_cast<const char*>(&le), sizeof(le));
    }
  }
  if (!out) throw IoError("failed writing tensor file: " + path);
}

const Tensor* TensorFile::find(std::string_view name) const {
  for (const Tensor& t : tensors_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Tensor& TensorFile::require(std::string_view name) const {
  const Tensor* t = find(name);
  if (!t) throw IoError("tensor '" + std::string(name) + "' not found");
  return *t;
}

}  // namespace rnsim

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rnsim/analog_core.hpp"
#include "rnsim/matrix.hpp"
#include "rnsim/rns.hpp"
#include "rnsim/rrns.hpp"

namespace rnsim::ref {

// Serial reference implementations. Everything here uses the plain remainder
// operator and wide integers instead of Barrett reduction and OpenMP, and is
// kept as the oracle the optimized kernels are tested and benchmarked against.

/// n mod m through the hardware divide.
uint64_t mod_naive(u128 n, uint64_t m);

/// CRT reconstruction with naive remainders.
uint64_t crt_reconstruct(std::span<const uint32_t> residues, const ModuliSet& ms);

/// Exact wide-integer dot product.
i128 dot_exact(std::span<const int32_t> a, std::span<const int32_t> b);
i128 dot_exact(std::span<const int64_t> a, std::span<const int64_t> b);

/// Exact wide-integer MVM, one output per matrix row.
std::vector<i128> mvm_exact(const QuantizedMatrix& wq, const QuantizedVector& xq);

/// Serial per-modulus dot product with naive remainders.
std::vector<uint32_t> residue_dot_product(const ResidueVector& a,
                                          const ResidueVector& b);

/// Serial RNS tile MVM (naive remainders), same noise model and substreams as
/// the parallel kernel, so outputs must match it bit for bit.
ResidueVector rns_tile_mvm(const QuantizedMatrix& wq, const QuantizedVector& xq,
                           const CoreConfig& cfg, const NoiseModel& noise,
                           uint64_t tile_key = 0);

/// Serial Monte Carlo rate estimation with the same substream layout as the
/// parallel version.
ErrorRates estimate_rates(const RrnsCode& code, const NoiseModel& noise,
                          uint64_t trials);

/// Plain double-precision MVM: y = W * x.
std::vector<double> mvm_double(const Matrix& w, std::span<const double> x);

}  // namespace rnsim::ref

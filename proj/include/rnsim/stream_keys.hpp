#pragma once

#include <cstdint>

#include "rnsim/rng.hpp"

namespace rnsim::streams {

// Substream key derivation shared by the parallel kernels and the serial
// reference implementations; both must draw identical noise for the
// bit-for-bit equivalence tests to hold.

inline uint64_t tile_noise(uint64_t tile_key) {
  return derive_stream(0x7469, {tile_key});
}

inline uint64_t rate_trial(uint64_t seed, uint64_t trial) {
  return derive_stream(seed, {0x7261746573, trial});
}

inline uint64_t retry_value(uint64_t seed, uint64_t trial) {
  return derive_stream(seed, {0x7265747279, trial});
}

inline uint64_t retry_attempt(uint64_t seed, uint64_t trial, uint64_t attempt) {
  return derive_stream(seed, {0x7265747279, trial, attempt});
}

inline uint64_t sample(uint64_t seed, uint64_t sample_index) {
  return derive_stream(seed, {0x73616d70, sample_index});
}

inline uint64_t layer(uint64_t seed, uint64_t layer_index) {
  return derive_stream(seed, {0x6c617965, layer_index});
}

inline uint64_t trial(uint64_t seed, uint64_t experiment_salt, uint64_t index) {
  return derive_stream(seed, {experiment_salt, index});
}

inline uint64_t gemm_tile(uint64_t call_key, uint64_t tile_row, uint64_t tile_col) {
  return derive_stream(call_key, {0x74696c65, tile_row, tile_col});
}

inline uint64_t rrns_element(uint64_t seed, uint64_t tile_key, uint64_t element,
                             uint64_t attempt) {
  return derive_stream(seed, {0x72726e73, tile_key, element, attempt});
}

}  // namespace rnsim::streams

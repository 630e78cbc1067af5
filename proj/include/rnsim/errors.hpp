#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rnsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two moduli share a common factor and cannot form an RNS base.
class NotCoprimeError : public Error {
 public:
  NotCoprimeError(uint64_t a, uint64_t b, uint64_t factor)
      : Error("moduli " + std::to_string(a) + " and " + std::to_string(b) +
              " share factor " + std::to_string(factor)),
        a_(a),
        b_(b),
        factor_(factor) {}

  uint64_t lhs() const { return a_; }
  uint64_t rhs() const { return b_; }
  uint64_t factor() const { return factor_; }

 private:
  uint64_t a_, b_, factor_;
};

/// A quantity exceeds the wide-integer capacity of the library.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A signed value falls outside the representable range of a moduli set.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// A residue is not reduced with respect to its modulus.
class InvalidResidueError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class ModuliMismatchError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration (bad core mode, unknown key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The moduli product cannot hold a full-precision dot-product output.
class RangeViolationError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rnsim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace entrolim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A request exceeded a configured computational horizon.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity has no closed form for this model; callers fall
/// back to the estimators.
class UnavailableError : public Error {
 public:
  using Error::Error;
};

/// Signal dimensions of two collaborating objects disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical integration failed (non-finite integrand, node budget exhausted).
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Exponent p of an L_p norm: a real p >= 1 or the explicit infinity sentinel.
///
/// Infinity is a distinct state rather than a large double so that the
/// uniform / esssup branches are taken exactly.
class LpExponent {
 public:
  static LpExponent finite(double p);
  static LpExponent infinity() { return LpExponent{}; }

  [[nodiscard]] bool is_infinite() const { return infinite_; }
  /// Finite value; +inf when is_infinite().
  [[nodiscard]] double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : p_;
  }
  /// "inf" or the shortest round-trip decimal form.
  [[nodiscard]] std::string to_string() const;
  /// Accepts "inf", "infinity", or a decimal number >= 1.
  static LpExponent parse(const std::string& text);

  friend bool operator==(const LpExponent& a, const LpExponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.p_ == b.p_);
  }

 private:
  LpExponent() = default;
  double p_ = 0.0;
  bool infinite_ = true;
};

/// Deterministic child seed derived from a master seed and a counter
/// (splitmix64 finalizer). Distinct indices give statistically independent
/// streams for std::mt19937_64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Shortest decimal representation that round-trips through strtod.
std::string format_double(double x);

}  // namespace entrolim

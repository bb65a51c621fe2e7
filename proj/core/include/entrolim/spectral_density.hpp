// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace entrolim {

/// Coefficients of S(w) = variance |1 + sum_j ma_j e^{-ijw}|^2 /
///                                 |1 - sum_j ar_j e^{-ijw}|^2.
struct RationalSpectrum {
  std::vector<double> ar;
  std::vector<double> ma;
  double variance = 1.0;

  [[nodiscard]] double operator()(double omega) const;
};

/// Power spectral density on [-pi, pi], even and non-negative.
class SpectralDensity {
 public:
  /// Wraps an arbitrary evaluator. Even symmetry and non-negativity are
  /// checked on a grid of `check_points` frequencies; throws InvalidArgument.
  explicit SpectralDensity(std::function<double(double)> evaluator,
                           int check_points = 257);
  explicit SpectralDensity(RationalSpectrum rational);

  static SpectralDensity flat(double level);

  [[nodiscard]] double operator()(double omega) const { return evaluator_(omega); }
  [[nodiscard]] const std::optional<RationalSpectrum>& rational() const {
    return rational_;
  }

 private:
  std::function<double(double)> evaluator_;
  std::optional<RationalSpectrum> rational_;
};

}  // namespace entrolim

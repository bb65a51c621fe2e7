// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entrolim {

/// Finite-past one-step linear predictors of every order 0..K for a
/// stationary scalar sequence.
///
/// For order k the predictor is  x_hat_n = sum_{j=1}^{k} taps(k)[j-1] x_{n-j}
/// with mean-square error error_variance[k].
struct LinearPredictorSet {
  /// coefficients[k].size() == k; only orders <= the stored limit are kept.
  std::vector<std::vector<double>> coefficients;
  std::vector<double> error_variance;             ///< P_0 = R(0), ..., P_K
  std::vector<double> reflection;                 ///< kappa_1..kappa_K

  [[nodiscard]] std::size_t max_order() const { return error_variance.size() - 1; }
  [[nodiscard]] std::span<const double> taps(std::size_t order) const {
    return coefficients[order];
  }
};

/// Levinson-Durbin recursion on autocovariances R(0..order). Prediction
/// coefficients are retained for orders <= stored_orders; error variances and
/// reflection coefficients for all orders.
/// Throws InvalidArgument if the Toeplitz matrix is not positive definite.
LinearPredictorSet levinson_durbin(std::span<const double> autocovariance,
                                   std::size_t order,
                                   std::size_t stored_orders = static_cast<std::size_t>(-1));

}  // namespace entrolim

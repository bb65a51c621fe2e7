// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/linear_prediction.hpp"

#include <algorithm>

#include "entrolim/common.hpp"

namespace entrolim {

LinearPredictorSet levinson_durbin(std::span<const double> autocovariance,
                                   std::size_t order,
                                   std::size_t stored_orders) {
  if (autocovariance.size() < order + 1) {
    throw InvalidArgument("levinson_durbin needs R(0..order)");
  }
  if (!(autocovariance[0] > 0.0)) {
    throw InvalidArgument("levinson_durbin needs R(0) > 0");
  }
  LinearPredictorSet out;
  out.coefficients.reserve(std::min(order, stored_orders) + 1);
  out.error_variance.reserve(order + 1);
  out.coefficients.emplace_back();
  out.error_variance.push_back(autocovariance[0]);

  std::vector<double> a;
  double err = autocovariance[0];
  for (std::size_t k = 1; k <= order; ++k) {
    double acc = autocovariance[k];
    for (std::size_t j = 1; j < k; ++j) acc -= a[j - 1] * autocovariance[k - j];
    const double kappa = acc / err;
    std::vector<double> next(k);
    for (std::size_t j = 1; j < k; ++j) next[j - 1] = a[j - 1] - kappa * a[k - j - 1];
    next[k - 1] = kappa;
    err *= (1.0 - kappa * kappa);
    if (!(err > 0.0)) {
      throw InvalidArgument("autocovariance sequence is not positive definite");
    }
    a = next;
    out.reflection.push_back(kappa);
    out.error_variance.push_back(err);
    if (k <= stored_orders) out.coefficients.push_back(std::move(next));
  }
  return out;
}

}  // namespace entrolim

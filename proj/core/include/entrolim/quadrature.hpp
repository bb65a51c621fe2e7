// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace entrolim {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  explicit GaussLegendreRule(std::size_t n);
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Adaptive Gauss-Legendre quadrature of f over [a, b] by interval bisection.
/// A panel is accepted once the 15-point rule on it agrees with the sum over
/// its two halves to within its share of `abs_tol`. Throws QuadratureError on
/// a non-finite integrand value or when `max_evaluations` is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol = 1e-9,
                                    std::size_t max_evaluations = std::size_t{1} << 20);

}  // namespace entrolim

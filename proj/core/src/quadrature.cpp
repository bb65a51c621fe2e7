// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "entrolim/common.hpp"

namespace entrolim {

GaussLegendreRule::GaussLegendreRule(std::size_t n) : nodes(n), weights(n) {
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

const GaussLegendreRule& rule15() {
  static const GaussLegendreRule rule(15);
  return rule;
}

struct Panel {
  double a;
  double b;
  double estimate;
  double tol;
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol, std::size_t max_evaluations) {
  const auto& rule = rule15();
  QuadratureResult result;

  auto apply = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const double fx = f(x);
      if (!std::isfinite(fx)) {
        throw QuadratureError("integrand is not finite at x=" + format_double(x));
      }
      s += rule.weights[i] * fx;
    }
    result.evaluations += rule.nodes.size();
    return half * s;
  };

  std::vector<Panel> stack{{a, b, apply(a, b), abs_tol}};
  while (!stack.empty()) {
    const Panel panel = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (panel.a + panel.b);
    const double left = apply(panel.a, mid);
    const double right = apply(mid, panel.b);
    const double diff = std::abs(left + right - panel.estimate);
    if (diff <= panel.tol || panel.b - panel.a < 1e-12 * std::abs(b - a)) {
      result.value += left + right;
      result.error_estimate += diff;
      continue;
    }
    if (result.evaluations >= max_evaluations) {
      throw QuadratureError("adaptive quadrature exceeded its evaluation budget");
    }
    stack.push_back({panel.a, mid, left, 0.5 * panel.tol});
    stack.push_back({mid, panel.b, right, 0.5 * panel.tol});
  }
  return result;
}

}  // namespace entrolim

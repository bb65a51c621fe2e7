// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "entrolim/common.hpp"
#include "entrolim/signal.hpp"

namespace entrolim {

using Rng = std::mt19937_64;

/// log2(2 pi e).
inline constexpr double kLog2TwoPiE = 4.094191170361282;

/// Differential entropy in bits of N(0, variance).
double gaussian_entropy_bits(double variance);

/**
 * Zero-mean generalized Gaussian (exponential power) density
 *
 *   f(x) = exp(-|x|^p / (p mu^p)) / (2 Gamma((p+1)/p) p^{1/p} mu),
 *
 * the maximum-entropy law among densities with [E|x|^p]^{1/p} = mu. p = 2 is
 * N(0, mu^2), p = 1 the Laplace law with E|x| = mu, and p = infinity the
 * uniform law on [-mu, mu].
 */
class GeneralizedGaussian {
 public:
  GeneralizedGaussian(LpExponent p, double mu);

  static GeneralizedGaussian gaussian(double variance);
  static GeneralizedGaussian laplace(double mu);
  static GeneralizedGaussian uniform(double half_width);

  [[nodiscard]] LpExponent p() const { return p_; }
  [[nodiscard]] double mu() const { return mu_; }

  [[nodiscard]] double pdf(double x) const;
  /// Uses the regularized lower incomplete gamma function.
  [[nodiscard]] double cdf(double x) const;
  [[nodiscard]] double entropy_bits() const;
  /// [E|x|^p]^{1/p}, which equals mu. Throws for p = infinity, where the
  /// relevant scale is the support half-width mu().
  [[nodiscard]] double lp_norm() const;
  /// E[x^2] = mu^2 p^{2/p} Gamma(3/p) / Gamma(1/p); mu^2/3 when p = infinity.
  [[nodiscard]] double variance() const;

  /// iid draws. |x|^p / (p mu^p) ~ Gamma(1/p, 1) with an independent sign.
  [[nodiscard]] std::vector<double> sample(std::size_t count,
                                           std::uint64_t seed) const;
  double draw(Rng& rng) const;

  [[nodiscard]] std::string descriptor() const;

  friend bool operator==(const GeneralizedGaussian& a,
                         const GeneralizedGaussian& b) {
    return a.p_ == b.p_ && a.mu_ == b.mu_;
  }

 private:
  LpExponent p_;
  double mu_;
};

/// Zero-mean Gaussian vector with SPD covariance.
class GaussianVector {
 public:
  explicit GaussianVector(Eigen::MatrixXd covariance);

  [[nodiscard]] std::size_t dim() const {
    return static_cast<std::size_t>(covariance_.rows());
  }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const { return covariance_; }

  /// log2 sqrt((2 pi e)^m det Sigma).
  [[nodiscard]] double entropy_bits() const;
  [[nodiscard]] Signal sample(std::size_t count, std::uint64_t seed) const;
  void draw(Rng& rng, std::span<double> out) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd cholesky_;
  double log2_det_ = 0.0;
};

/// Throws InvalidArgument unless `m` is symmetric (to 1e-12) with strictly
/// positive eigenvalues.
void require_spd(const Eigen::MatrixXd& m, const std::string& what);

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/distributions.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>

namespace entrolim {

double gaussian_entropy_bits(double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  return 0.5 * (kLog2TwoPiE + std::log2(variance));
}

GeneralizedGaussian::GeneralizedGaussian(LpExponent p, double mu)
    : p_(p), mu_(mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("generalized Gaussian scale mu must be positive");
  }
}

GeneralizedGaussian GeneralizedGaussian::gaussian(double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  return {LpExponent::finite(2.0), std::sqrt(variance)};
}

GeneralizedGaussian GeneralizedGaussian::laplace(double mu) {
  return {LpExponent::finite(1.0), mu};
}

GeneralizedGaussian GeneralizedGaussian::uniform(double half_width) {
  return {LpExponent::infinity(), half_width};
}

double GeneralizedGaussian::pdf(double x) const {
  const double ax = std::abs(x);
  if (p_.is_infinite()) return ax <= mu_ ? 0.5 / mu_ : 0.0;
  const double p = p_.value();
  const double norm =
      2.0 * std::tgamma((p + 1.0) / p) * std::pow(p, 1.0 / p) * mu_;
  return std::exp(-std::pow(ax / mu_, p) / p) / norm;
}

double GeneralizedGaussian::cdf(double x) const {
  if (p_.is_infinite()) {
    if (x <= -mu_) return 0.0;
    if (x >= mu_) return 1.0;
    return 0.5 * (x + mu_) / mu_;
  }
  const double p = p_.value();
  const double t = std::pow(std::abs(x) / mu_, p) / p;
  const double half_mass = 0.5 * boost::math::gamma_p(1.0 / p, t);
  return x >= 0.0 ? 0.5 + half_mass : 0.5 - half_mass;
}

double GeneralizedGaussian::entropy_bits() const {
  if (p_.is_infinite()) return std::log2(2.0 * mu_);
  const double p = p_.value();
  return std::log2(2.0) + std::lgamma((p + 1.0) / p) / std::numbers::ln2 +
         std::log2(p * std::numbers::e) / p + std::log2(mu_);
}

double GeneralizedGaussian::lp_norm() const {
  if (p_.is_infinite()) {
    throw InvalidArgument(
        "L_p norm requested for p = infinity; use the support half-width");
  }
  return mu_;
}

double GeneralizedGaussian::variance() const {
  if (p_.is_infinite()) return mu_ * mu_ / 3.0;
  const double p = p_.value();
  return mu_ * mu_ * std::pow(p, 2.0 / p) *
         std::exp(std::lgamma(3.0 / p) - std::lgamma(1.0 / p));
}

double GeneralizedGaussian::draw(Rng& rng) const {
  if (p_.is_infinite()) {
    std::uniform_real_distribution<double> u(-mu_, mu_);
    return u(rng);
  }
  const double p = p_.value();
  std::gamma_distribution<double> gamma(1.0 / p, 1.0);
  const double magnitude = mu_ * std::pow(p * gamma(rng), 1.0 / p);
  return (rng() & 1U) != 0 ? magnitude : -magnitude;
}

std::vector<double> GeneralizedGaussian::sample(std::size_t count,
                                                std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = draw(rng);
  return out;
}

std::string GeneralizedGaussian::descriptor() const {
  return "gg(p=" + p_.to_string() + ",mu=" + format_double(mu_) + ")";
}

void require_spd(const Eigen::MatrixXd& m, const std::string& what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidArgument(what + " must be a non-empty square matrix");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument(what + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidArgument(what + " must be positive definite");
  }
}

GaussianVector::GaussianVector(Eigen::MatrixXd covariance)
    : covariance_(std::move(covariance)) {
  require_spd(covariance_, "Gaussian covariance");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  cholesky_ = llt.matrixL();
  log2_det_ = 2.0 * cholesky_.diagonal().array().log2().sum();
}

double GaussianVector::entropy_bits() const {
  return 0.5 * (static_cast<double>(dim()) * kLog2TwoPiE + log2_det_);
}

void GaussianVector::draw(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(cholesky_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  const Eigen::VectorXd x = cholesky_ * z;
  for (Eigen::Index i = 0; i < x.size(); ++i) out[static_cast<std::size_t>(i)] = x[i];
}

Signal GaussianVector::sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  Signal out(dim(), count);
  for (std::size_t k = 0; k < count; ++k) draw(rng, out.at(k));
  return out;
}

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "entrolim/quadrature.hpp"

namespace entrolim {

double RationalSpectrum::operator()(double omega) const {
  using cd = std::complex<double>;
  cd num(1.0, 0.0);
  cd den(1.0, 0.0);
  for (std::size_t j = 0; j < ma.size(); ++j)
    num += ma[j] * std::polar(1.0, -omega * static_cast<double>(j + 1));
  for (std::size_t j = 0; j < ar.size(); ++j)
    den -= ar[j] * std::polar(1.0, -omega * static_cast<double>(j + 1));
  return variance * std::norm(num) / std::norm(den);
}

SpectralDensity::SpectralDensity(std::function<double(double)> evaluator, int check_points)
    : evaluator_(std::move(evaluator)) {
  for (int i = 0; i < check_points; ++i) {
    const double w = std::numbers::pi * i / std::max(1, check_points - 1);
    const double pos = evaluator_(w);
    const double neg = evaluator_(-w);
    if (!(pos >= 0.0) || !(neg >= 0.0)) {
      throw InvalidArgument("spectral density must be non-negative");
    }
    if (std::abs(pos - neg) > 1e-12 * std::max(1.0, std::abs(pos))) {
      throw InvalidArgument("spectral density must be even in omega");
    }
  }
}

SpectralDensity::SpectralDensity(RationalSpectrum rational)
    : evaluator_([r = rational](double w) { return r(w); }), rational_(std::move(rational)) {
  if (!(rational_->variance > 0.0)) {
    throw InvalidArgument("rational spectrum variance must be positive");
  }
}

SpectralDensity SpectralDensity::flat(double level) {
  return SpectralDensity(RationalSpectrum{{}, {}, level});
}

double szego_entropy_integral_bits(const SpectralDensity& s) {
  auto integrand = [&](double w) {
    const double v = s(w);
    if (!(v > 0.0)) {
      throw QuadratureError("spectral density vanishes at omega=" + format_double(w) +
                            "; regularize before taking the log-integral");
    }
    return 0.5 * std::log2(v);
  };
  const auto r = integrate_adaptive(integrand, 0.0, std::numbers::pi, 1e-9 * std::numbers::pi);
  return 0.5 * kLog2TwoPiE + r.value / std::numbers::pi;
}

double negentropy_rate_bits(const DisturbanceModel& model) {
  const double j = szego_entropy_integral_bits(model.power_spectrum()) - model.entropy_rate_bits();
  if (j < -1e-6) {
    throw Error("negative negentropy rate " + format_double(j) + " for " + model.descriptor());
  }
  return j;
}

double gaussianity_whiteness(const DisturbanceModel& model) {
  return std::exp2(2.0 * model.entropy_rate_bits() - kLog2TwoPiE) / model.stationary_variance();
}

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "entrolim/linear_prediction.hpp"
#include "entrolim/processes.hpp"
#include "entrolim/quadrature.hpp"
#include "random_models.hpp"

namespace entrolim {
namespace {

const double kHalfLog2TwoPiE = 0.5 * std::log2(2 * std::numbers::pi * std::numbers::e);

double sample_variance(std::span<const double> xs) {
  double m = 0.0, m2 = 0.0;
  for (double x : xs) {
    m += x;
    m2 += x * x;
  }
  const auto n = static_cast<double>(xs.size());
  return m2 / n - (m / n) * (m / n);
}

TEST(DisturbanceModel, Ar1SampleVariance) {
  const auto model = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  const Signal path = model.sample_path(1000000, 3);
  EXPECT_NEAR(sample_variance(path.raw()), 4.0 / 3.0, 0.01 * 4.0 / 3.0);
}

TEST(DisturbanceModel, IidUniformSupport) {
  const auto model = DisturbanceModel::iid(GeneralizedGaussian::uniform(1.0));
  const Signal path = model.sample_path(1000000, 4);
  double mx = 0.0;
  for (double x : path.raw()) mx = std::max(mx, std::abs(x));
  EXPECT_LE(mx, 1.0);
  EXPECT_GT(mx, 0.99);
}

TEST(DisturbanceModel, VectorIidCovariance) {
  const auto model = DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const Signal path = model.sample_path(200000, 5);
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k < path.length(); ++k) {
    const Eigen::Vector2d x(path.at(k)[0], path.at(k)[1]);
    acc += x * x.transpose();
  }
  acc /= static_cast<double>(path.length());
  EXPECT_NEAR(acc(0, 0), 1.0, 0.02);
  EXPECT_NEAR(acc(1, 1), 1.0, 0.02);
  EXPECT_NEAR(acc(0, 1), 0.0, 0.02);
}

TEST(DisturbanceModel, VectorStationaryStart) {
  Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  const auto model = DisturbanceModel::vector_gauss_ar(a, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_NEAR(model.stationary_covariance()(0, 0), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(model.stationary_covariance()(0, 1), 0.0, 1e-12);
  // The first sample is already stationary.
  double s = 0.0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    const double x = model.sample_path(1, static_cast<std::uint64_t>(r)).at(0)[0];
    s += x * x;
  }
  EXPECT_NEAR(s / reps, 4.0 / 3.0, 0.05);
}

TEST(DisturbanceModel, Ar1FirstSampleIsStationary) {
  const auto model = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  double s = 0.0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    const double x = model.sample_path(1, static_cast<std::uint64_t>(r)).scalar(0);
    s += x * x;
  }
  EXPECT_NEAR(s / reps, 1.0 / 0.19, 0.06 / 0.19);
}

TEST(DisturbanceModel, GenGaussArStationaryVariance) {
  const auto model = DisturbanceModel::gen_gauss_ar({0.9}, GeneralizedGaussian::uniform(1.0));
  EXPECT_NEAR(model.stationary_variance(), (1.0 / 3.0) / 0.19, 1e-12);
  const Signal path = model.sample_path(1000000, 6);
  EXPECT_NEAR(sample_variance(path.raw()), (1.0 / 3.0) / 0.19, 0.03 * (1.0 / 3.0) / 0.19);
}

TEST(DisturbanceModel, SamplePathIsDeterministic) {
  const auto model = DisturbanceModel::gauss_arma({0.5, -0.2}, {0.3}, 2.0);
  EXPECT_EQ(model.sample_path(500, 1), model.sample_path(500, 1));
  EXPECT_NE(model.sample_path(500, 1), model.sample_path(500, 2));
}

TEST(DisturbanceModel, ConditionalEntropyExamples) {
  const auto ar = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  EXPECT_NEAR(ar.conditional_entropy_bits(0), 2.25457, 1e-4);
  EXPECT_NEAR(ar.conditional_entropy_bits(0), 0.5 * std::log2(2 * std::numbers::pi * std::numbers::e * 4 / 3), 1e-12);
  for (std::size_t k : {1, 2, 10, 500}) EXPECT_NEAR(ar.conditional_entropy_bits(k), kHalfLog2TwoPiE, 1e-12);
  const auto lap = DisturbanceModel::iid(GeneralizedGaussian::laplace(1.0));
  for (std::size_t k : {0, 1, 7}) EXPECT_NEAR(lap.conditional_entropy_bits(k), 2.44270, 1e-5);
}

TEST(DisturbanceModel, ConditionalEntropyErrors) {
  const auto ar = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  EXPECT_THROW((void)ar.conditional_entropy_bits(ar.prediction_horizon() + 1), CapacityError);
  const auto gg = DisturbanceModel::gen_gauss_ar({0.5, 0.2}, GeneralizedGaussian::laplace(1.0));
  EXPECT_THROW((void)gg.conditional_entropy_bits(1), UnavailableError);
  EXPECT_NEAR(gg.conditional_entropy_bits(2), std::log2(2 * std::numbers::e), 1e-12);
}

TEST(DisturbanceModel, VectorConditionalEntropy) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.1, 0.0, 0.3;
  Eigen::MatrixXd sw(2, 2);
  sw << 2.0, 0.5, 0.5, 1.0;
  const auto model = DisturbanceModel::vector_gauss_ar(a, sw);
  const double expected = 0.5 * std::log2(std::pow(2 * std::numbers::pi * std::numbers::e, 2) * sw.determinant());
  EXPECT_NEAR(model.conditional_entropy_bits(1), expected, 1e-12);
  EXPECT_NEAR(model.entropy_rate_bits(), expected, 1e-12);
  EXPECT_GT(model.conditional_entropy_bits(0), expected);
}

TEST(DisturbanceModel, EntropyRateExamples) {
  EXPECT_NEAR(DisturbanceModel::gauss_arma({0.5}, {}, 1.0).entropy_rate_bits(), 2.04710, 1e-5);
  EXPECT_NEAR(DisturbanceModel::gen_gauss_ar({0.9}, GeneralizedGaussian::uniform(1.0)).entropy_rate_bits(), 1.0, 1e-15);
  EXPECT_NEAR(DisturbanceModel::iid(GeneralizedGaussian::gaussian(2.0)).entropy_rate_bits(), 2.54710, 1e-5);
}

TEST(DisturbanceModel, AutocovarianceExamples) {
  const auto ar = DisturbanceModel::gauss_arma({0.5}, {}, 1.0).autocovariance(5);
  for (std::size_t j = 0; j <= 5; ++j) EXPECT_NEAR(ar[j], 4.0 / 3.0 * std::pow(0.5, j), 1e-13);
  const auto iid = DisturbanceModel::iid(GeneralizedGaussian::gaussian(1.0)).autocovariance(3);
  EXPECT_NEAR(iid[0], 1.0, 1e-15);
  for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(iid[j], 0.0);
  const auto ma = DisturbanceModel::gauss_arma({}, {0.5}, 1.0).autocovariance(3);
  EXPECT_NEAR(ma[0], 1.25, 1e-15);
  EXPECT_NEAR(ma[1], 0.5, 1e-15);
  EXPECT_NEAR(ma[2], 0.0, 1e-15);
}

// ARMA(1,1) closed form: R0 = s2 (1 + 2 a t + t^2) / (1 - a^2), R1 = s2 (1 + a t)(a + t) / (1 - a^2).
TEST(DisturbanceModel, Arma11AutocovarianceClosedForm) {
  const double a = 0.6, t = 0.4, s2 = 1.5;
  const auto r = arma_autocovariance(std::vector{a}, std::vector{t}, s2, 4);
  EXPECT_NEAR(r[0], s2 * (1 + 2 * a * t + t * t) / (1 - a * a), 1e-12);
  EXPECT_NEAR(r[1], s2 * (1 + a * t) * (a + t) / (1 - a * a), 1e-12);
  for (std::size_t j = 2; j <= 4; ++j) EXPECT_NEAR(r[j], a * r[j - 1], 1e-12);
}

TEST(DisturbanceModel, PowerSpectrumExamples) {
  const auto flat = DisturbanceModel::iid(GeneralizedGaussian::gaussian(1.0)).power_spectrum();
  for (double w : {-3.0, 0.0, 1.0, 3.1}) EXPECT_NEAR(flat(w), 1.0, 1e-15);
  const auto ar = DisturbanceModel::gauss_arma({0.5}, {}, 1.0).power_spectrum();
  EXPECT_NEAR(ar(0.0), 4.0, 1e-13);
  EXPECT_NEAR(ar(std::numbers::pi), 1.0 / 2.25, 1e-13);
}

TEST(DisturbanceModel, RejectsInvalidModels) {
  EXPECT_THROW(DisturbanceModel::gauss_arma({1.0}, {}, 1.0), InvalidArgument);
  EXPECT_THROW(DisturbanceModel::gauss_arma({1.2, -0.1}, {}, 1.0), InvalidArgument);
  EXPECT_THROW(DisturbanceModel::gauss_arma({}, {1.5}, 1.0), InvalidArgument);
  EXPECT_THROW(DisturbanceModel::gauss_arma({0.5}, {}, 0.0), InvalidArgument);
  EXPECT_THROW(DisturbanceModel::gen_gauss_ar({-1.1}, GeneralizedGaussian::laplace(1.0)), InvalidArgument);
  EXPECT_THROW(DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)),
               InvalidArgument);
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0, -1;
  EXPECT_THROW(DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 2), bad), InvalidArgument);
  EXPECT_THROW(DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Identity(2, 2)),
               DimensionError);
}

TEST(DisturbanceModel, SpectralRadiusAndImpulseResponse) {
  EXPECT_NEAR(ar_spectral_radius(std::vector{0.5}), 0.5, 1e-14);
  EXPECT_NEAR(ar_spectral_radius(std::vector{1.2, -0.35}), 0.7, 1e-12);
  EXPECT_EQ(ar_spectral_radius(std::vector<double>{}), 0.0);
  const auto psi = arma_impulse_response(std::vector{0.8}, std::vector{0.5}, 4);
  EXPECT_NEAR(psi[0], 1.0, 1e-15);
  EXPECT_NEAR(psi[1], 1.3, 1e-15);
  EXPECT_NEAR(psi[2], 1.04, 1e-14);
  EXPECT_NEAR(psi[3], 0.832, 1e-14);
}

// Levinson-Durbin against a dense Toeplitz solve.
TEST(LevinsonDurbin, MatchesDirectToeplitzSolve) {
  const auto r = arma_autocovariance(std::vector{0.7, -0.2}, std::vector{0.4}, 1.3, 12);
  const auto set = levinson_durbin(r, 8);
  for (std::size_t order : {1, 3, 8}) {
    Eigen::MatrixXd t(order, order);
    Eigen::VectorXd rhs(order);
    for (std::size_t i = 0; i < order; ++i) {
      rhs(i) = r[i + 1];
      for (std::size_t j = 0; j < order; ++j) t(i, j) = r[i > j ? i - j : j - i];
    }
    const Eigen::VectorXd a = t.ldlt().solve(rhs);
    const auto taps = set.taps(order);
    ASSERT_EQ(taps.size(), order);
    for (std::size_t i = 0; i < order; ++i) EXPECT_NEAR(taps[i], a(i), 1e-11);
    EXPECT_NEAR(set.error_variance[order], r[0] - rhs.dot(a), 1e-11);
  }
}

TEST(LevinsonDurbin, RejectsNonPositiveDefinite) {
  const std::vector<double> r{1.0, 1.0, 1.0};
  EXPECT_THROW(levinson_durbin(r, 2), InvalidArgument);
}

TEST(DisturbanceModel, PredictionVariancesDecreaseToInnovation) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testing::random_gauss_arma(rng, 0.95);
    const auto& pv = model.predictors().error_variance;
    const double s2 = model.innovation_variance();
    for (std::size_t k = 1; k < pv.size(); ++k) {
      EXPECT_LE(pv[k], pv[k - 1] * (1 + 1e-12));
      EXPECT_GE(pv[k], s2 * (1 - 1e-12));
    }
  }
}

TEST(DisturbanceModel, ConditionalEntropyConvergesToRate) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testing::random_gauss_arma(rng, 0.95);
    const auto schedule = model.entropy_schedule(400);
    for (std::size_t k = 1; k < schedule.conditional_bits.size(); ++k)
      EXPECT_LE(schedule.conditional_bits[k], schedule.conditional_bits[k - 1] + 1e-12);
    for (std::size_t k = 200; k <= 400; k += 50)
      EXPECT_LT(std::abs(model.conditional_entropy_bits(k) - model.entropy_rate_bits()), 1e-6)
          << model.descriptor() << " k=" << k;
  }
}

TEST(DisturbanceModel, SpectrumAverageEqualsVariance) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testing::random_gauss_arma(rng, 0.9);
    const auto s = model.power_spectrum();
    const double mean = integrate_adaptive([&](double w) { return s(w); }, 0.0, std::numbers::pi, 1e-12).value /
                        std::numbers::pi;
    EXPECT_NEAR(mean, model.autocovariance(0)[0], 1e-8 * std::max(1.0, mean)) << model.descriptor();
  }
}

// Sample autocovariances of a long path against the model, with Monte Carlo
// standard errors from 100 batch estimates.
TEST(DisturbanceModel, SampleAutocovarianceMatchesModel) {
  const auto model = DisturbanceModel::gauss_arma({0.6, -0.3}, {0.4}, 1.0);
  const auto truth = model.autocovariance(5);
  const std::size_t n = 1000000, batches = 100, len = n / batches;
  const Signal path = model.sample_path(n, 12);
  for (std::size_t lag = 0; lag <= 5; ++lag) {
    std::vector<double> est(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
      double s = 0.0;
      for (std::size_t t = b * len + lag; t < (b + 1) * len; ++t) s += path.scalar(t) * path.scalar(t - lag);
      est[b] = s / static_cast<double>(len - lag);
    }
    double m = 0.0, m2 = 0.0;
    for (double e : est) {
      m += e;
      m2 += e * e;
    }
    m /= batches;
    const double se = std::sqrt((m2 / batches - m * m) / (batches - 1));
    EXPECT_NEAR(m, truth[lag], 3 * se) << "lag " << lag;
  }
}

}  // namespace
}  // namespace entrolim

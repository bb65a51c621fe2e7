// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "entrolim/distributions.hpp"
#include "entrolim/linear_prediction.hpp"
#include "entrolim/signal.hpp"
#include "entrolim/spectral_density.hpp"

namespace entrolim {

/// d_k = w_k, w iid generalized Gaussian.
struct IidSpec {
  GeneralizedGaussian innovation;
};

/// d_k = sum_i ar_i d_{k-i} + w_k + sum_j ma_j w_{k-j}, w ~ N(0, variance).
struct GaussArmaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  double innovation_variance = 1.0;
};

/// d_k = sum_i ar_i d_{k-i} + w_k, w iid generalized Gaussian.
struct GenGaussArSpec {
  std::vector<double> ar;
  GeneralizedGaussian innovation;
};

/// d_k = A d_{k-1} + w_k, w ~ N(0, Sigma_w) in R^m.
struct VectorGaussArSpec {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd innovation_covariance;
};

using ModelSpec = std::variant<IidSpec, GaussArmaSpec, GenGaussArSpec, VectorGaussArSpec>;

enum class ModelKind { iid, gauss_arma, gen_gauss_ar, vector_gauss_ar };

/// Per-step conditional entropies h(d_k | d_0..d_{k-1}) and the entropy rate.
struct EntropySchedule {
  std::vector<double> conditional_bits;
  double entropy_rate_bits = 0.0;
};

struct ModelOptions {
  /// Largest k for which finite-past Gaussian prediction variances are
  /// tabulated (Levinson-Durbin horizon).
  std::size_t prediction_horizon = 2048;
};

/**
 * A stationary disturbance process with closed-form second-order statistics
 * and entropies.
 *
 * Validation happens at construction: AR polynomials must have all roots
 * strictly outside the unit circle, MA polynomials must be invertible, the
 * vector transition must have spectral radius < 1, and innovation
 * (co)variances must be positive (definite). Instances are immutable and can
 * be shared between threads.
 *
 * Sample paths start in the stationary regime. Gaussian models draw their
 * initial state from the exact stationary law; non-Gaussian AR models run a
 * burn-in of 10 x effective_memory() steps from rest.
 */
class DisturbanceModel {
 public:
  explicit DisturbanceModel(ModelSpec spec, ModelOptions options = {});

  static DisturbanceModel iid(GeneralizedGaussian innovation);
  static DisturbanceModel gauss_arma(std::vector<double> ar, std::vector<double> ma,
                                     double innovation_variance);
  static DisturbanceModel gen_gauss_ar(std::vector<double> ar,
                                       GeneralizedGaussian innovation);
  static DisturbanceModel vector_gauss_ar(Eigen::MatrixXd transition,
                                          Eigen::MatrixXd innovation_covariance);

  [[nodiscard]] const ModelSpec& spec() const { return state_->spec; }
  [[nodiscard]] ModelKind kind() const;
  [[nodiscard]] std::size_t dim() const;
  [[nodiscard]] bool is_gaussian() const;
  [[nodiscard]] std::string descriptor() const;

  [[nodiscard]] Signal sample_path(std::size_t length, std::uint64_t seed) const;

  /// h(d_k | d_0..d_{k-1}) in bits.
  /// Throws CapacityError for Gaussian ARMA when k exceeds the prediction
  /// horizon, and UnavailableError for non-Gaussian AR when k < AR order.
  [[nodiscard]] double conditional_entropy_bits(std::size_t k) const;
  [[nodiscard]] EntropySchedule entropy_schedule(std::size_t k_max) const;
  [[nodiscard]] double entropy_rate_bits() const;

  /// R(0..max_lag) of a scalar model.
  [[nodiscard]] std::vector<double> autocovariance(std::size_t max_lag) const;
  /// Rational spectrum of a scalar model.
  [[nodiscard]] SpectralDensity power_spectrum() const;

  /// lim E[d_k^2] for scalar models.
  [[nodiscard]] double stationary_variance() const;
  /// lim E[d_k d_k^T]; 1x1 for scalar models.
  [[nodiscard]] Eigen::MatrixXd stationary_covariance() const;
  /// Variance of w_k for scalar models.
  [[nodiscard]] double innovation_variance() const;
  /// Innovation entropy h(w_k) in bits.
  [[nodiscard]] double innovation_entropy_bits() const;

  /// Scalar AR / MA coefficients (empty for iid and vector models).
  [[nodiscard]] std::span<const double> ar() const;
  [[nodiscard]] std::span<const double> ma() const;
  /// Vector transition matrix (vector models only).
  [[nodiscard]] const Eigen::MatrixXd& transition() const;

  /// Steps for the impulse response to decay by 1e-3, at least the model order.
  [[nodiscard]] std::size_t effective_memory() const { return state_->effective_memory; }
  [[nodiscard]] std::size_t prediction_horizon() const { return state_->options.prediction_horizon; }

  /// Finite-past linear predictors for scalar models, coefficients stored up
  /// to prediction_order().
  [[nodiscard]] const LinearPredictorSet& predictors() const;
  /// Order beyond which the finite-past predictor equals the infinite-past
  /// one to 1e-12 relative prediction variance.
  [[nodiscard]] std::size_t prediction_order() const { return state_->prediction_order; }

 private:
  struct State {
    State(ModelSpec s, ModelOptions o) : spec(std::move(s)), options(o) {}
    ModelSpec spec;
    ModelOptions options;
    std::vector<double> psi;            // impulse response, scalar models
    std::vector<double> autocov;        // R(0..max(p, q)), scalar models
    Eigen::MatrixXd stationary_cov;     // vector models, and 1x1 for scalar
    Eigen::MatrixXd initial_state_chol; // Gaussian ARMA stationary start
    LinearPredictorSet predictors;
    std::size_t prediction_order = 0;
    std::size_t effective_memory = 1;
  };
  std::shared_ptr<const State> state_;
};

/// Autocovariances R(0..max_lag) of an ARMA recursion driven by white noise
/// of the given variance: solve the first (p+1) Yule-Walker equations, then
/// recurse.
std::vector<double> arma_autocovariance(std::span<const double> ar,
                                        std::span<const double> ma,
                                        double innovation_variance,
                                        std::size_t max_lag);

/// Impulse response psi_0..psi_n of (1 + sum ma z^j) / (1 - sum ar z^i).
std::vector<double> arma_impulse_response(std::span<const double> ar,
                                          std::span<const double> ma,
                                          std::size_t n);

/// Largest |root|^{-1} of 1 - sum ar_i z^i (spectral radius of the companion
/// matrix); stable iff < 1. Returns 0 for an empty polynomial.
double ar_spectral_radius(std::span<const double> ar);

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entrolim/common.hpp"
#include "entrolim/signal.hpp"

namespace entrolim {

/// Point estimate with a standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// [E|x|^p]^{1/p} estimated from samples.
struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;
  /// Set for p = infinity on any data: the sample maximum underestimates the
  /// essential supremum, severely so for unbounded support.
  bool downward_biased = false;
};

/**
 * Sample L_p norm.
 *
 * Finite p: [mean |x|^p]^{1/p} with a delta-method standard error. When
 * `batches` > 1 the variance of mean |x|^p is estimated from that many
 * contiguous batch means instead of the iid formula, which stays valid for
 * serially dependent sequences.
 *
 * p = infinity: max |x|. The standard error is the spread of the maxima of 20
 * contiguous blocks, a scale for how far the sample maximum may sit from the
 * supremum.
 */
NormEstimate lp_norm_estimate(std::span<const double> samples, LpExponent p,
                              std::size_t batches = 0);

enum class EntropyEstimator { vasicek, knn_kl };
std::string to_string(EntropyEstimator id);

struct EntropyEstimate {
  double value_bits = 0.0;
  double std_error_bits = 0.0;
  EntropyEstimator estimator_id = EntropyEstimator::vasicek;
  std::size_t sample_count = 0;
  /// More than 10% tied order statistics (Vasicek).
  bool ties_warning = false;
  /// Duplicate points were jittered (kNN).
  bool jitter_applied = false;
  /// The point cloud is (numerically) supported on a lower-dimensional set.
  bool degenerate = false;
};

/**
 * Differential entropy of scalar samples in bits: spacing estimator with
 * window m = round(sqrt(n)) in Correa's local-regression form (windows
 * truncated at the sample edges), which removes most of the small-sample
 * bias of the raw Vasicek statistic. The standard error is a delete-one-group
 * jackknife over 20 random groups drawn with `seed`. Requires n >= 100.
 */
EntropyEstimate entropy_estimate_1d(std::span<const double> samples, std::uint64_t seed = 0);

/**
 * Kozachenko-Leonenko k-nearest-neighbour entropy of m-vectors in bits
 * (Euclidean norm, m <= 4). Exact duplicates are separated by 1e-12 relative
 * jitter. The standard error is the spread of the estimate over 20 disjoint
 * random blocks divided by sqrt(20).
 */
EntropyEstimate entropy_estimate_knn(const Signal& samples, std::size_t k_neighbors = 4,
                                     std::uint64_t seed = 0);

/// h(d_k | d_{k-memory}..d_{k-1}) from one stationary path, as the difference
/// of kNN entropies of delay vectors of length memory+1 and memory.
/// Requires length >= 10^4 and memory <= 3.
EntropyEstimate conditional_entropy_estimate(std::span<const double> path, std::size_t memory,
                                             std::size_t k_neighbors = 4,
                                             std::uint64_t seed = 0);

struct MutualInformationEstimate {
  /// max(raw_bits, 0).
  double value_bits = 0.0;
  double std_error_bits = 0.0;
  double raw_bits = 0.0;
  /// The joint sample is degenerate (e.g. x = y); value_bits is then only a
  /// lower bound on a divergent quantity.
  bool saturated = false;
};

/// I(x; y) = h(x) + h(y) - h(x, y) with kNN entropies. Standard error from 20
/// disjoint blocks. Requires equal lengths >= 10^4 and dim(x)+dim(y) <= 4.
MutualInformationEstimate mutual_information_estimate(const Signal& x, const Signal& y,
                                                      std::size_t k_neighbors = 4,
                                                      std::uint64_t seed = 0);

struct WhitenessReport {
  /// Sample autocorrelations at lags 1..max_lag.
  std::vector<double> autocorrelations;
  /// Ljung-Box Q over max_lag lags.
  double portmanteau = 0.0;
  /// Upper tail probability of Q under chi-squared(max_lag).
  double p_value = 1.0;
  /// kNN estimate of I(e_k; e_{k-1}).
  double mi_lag1_bits = 0.0;
  double mi_lag1_std_error = 0.0;

  /// Ljung-Box not rejected at level alpha and I(e_k; e_{k-1}) below
  /// max(mi_threshold, 3 standard errors).
  [[nodiscard]] bool passed(double alpha = 1e-3, double mi_threshold = 0.02) const;
};

/// Requires length >= 100 * max_lag. The lag-1 MI uses at most
/// `max_mi_samples` leading pairs; 0 skips it.
WhitenessReport whiteness_stats(std::span<const double> e, std::size_t max_lag,
                                std::uint64_t seed = 0, std::size_t max_mi_samples = 100000);

struct DensityFit {
  /// sup |F_n - F| against GG(p, mu_hat).
  double ks_distance = 0.0;
  /// 1.63 / sqrt(n), the 1% Kolmogorov critical value.
  double threshold = 0.0;
  double fitted_mu = 0.0;
  [[nodiscard]] bool passed() const { return ks_distance < threshold; }
};

/// Kolmogorov-Smirnov distance to the generalized Gaussian whose scale is the
/// sample L_p norm (sample max |x| for p = infinity). Requires n >= 1000.
DensityFit density_fit_gg(std::span<const double> samples, LpExponent p);

struct DeterminantEstimate {
  double det = 0.0;
  double std_error = 0.0;
  bool singular = false;
};

/// det of the sample covariance of m-vectors, 20-group jackknife standard
/// error. Requires at least 100 m samples. A covariance whose smallest
/// eigenvalue is below 1e-10 of the largest is flagged singular and reported
/// as 0.
DeterminantEstimate covariance_det_estimate(const Signal& samples, std::uint64_t seed = 0);

}  // namespace entrolim

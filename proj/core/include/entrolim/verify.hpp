// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entrolim/bounds.hpp"
#include "entrolim/config.hpp"
#include "entrolim/estimators.hpp"
#include "entrolim/processes.hpp"
#include "entrolim/simulator.hpp"

namespace entrolim {

/// Diagnostics of the equality conditions on one error trace.
struct TightnessReport {
  WhitenessReport whiteness;
  DensityFit density_fit;
  /// I(e_k; e_{k-1}).
  MutualInformationEstimate mi_error_lag1;
  /// I(e_k; d_{k-1}).
  MutualInformationEstimate mi_error_past_disturbance;

  [[nodiscard]] bool whiteness_pass() const { return whiteness.passed(); }
  [[nodiscard]] bool ggfit_pass() const { return density_fit.passed(); }
  /// The two lag-1 informations agree within 3 combined standard errors.
  [[nodiscard]] bool mi_identity_holds() const;
};

struct TightnessOptions {
  std::size_t max_lag = 10;
  /// Leading samples excluded (transient).
  std::size_t skip = 0;
  std::uint64_t seed = 0;
};

/// Whiteness, GG(p) fit and the lag-1 information pair for trace.e (scalar).
/// Requires at least 10^4 samples after `skip`.
TightnessReport tightness_report(const SimulationTrace& trace, LpExponent p,
                                 const TightnessOptions& options = {});

/// Determinant-specific parts of a MIMO report.
struct MimoProductCheck {
  BoundReport bound;
  double empirical = 0.0;
  double std_error = 0.0;
  double gap_ratio = 0.0;
  bool violation = false;
};

struct VerificationReport {
  BoundReport bound;
  double empirical_norm = 0.0;
  double std_error = 0.0;
  /// empirical_norm / bound.bound_value.
  double gap_ratio = 0.0;
  /// empirical_norm < bound - 3 std_error.
  bool violation = false;
  /// Sample-maximum estimate (p = infinity): biased towards the bound.
  bool downward_biased = false;
  std::optional<TightnessReport> tightness;
  /// Asymptotic within-trace estimate on a trace that failed the whiteness
  /// check: the norm is still a time average, but it is not an i.i.d. one.
  bool whiteness_caveat = false;
  std::optional<MimoProductCheck> mimo_product;
  std::int64_t runtime_ms = 0;
  std::vector<std::uint64_t> seeds;
  std::string model_descriptor;
  std::string controller_descriptor;
};

struct VerifyOptions {
  /// 0 selects max(10 x model memory, 1000).
  std::size_t burn_in = 0;
  bool tightness = true;
  std::size_t whiteness_lags = 10;
  bool record_runtime = true;
};

/// Default burn-in max(10 x effective memory, 1000).
std::size_t default_burn_in(const DisturbanceModel& model);

/**
 * Compares the empirical L_p norm of the closed-loop error with the bound.
 *
 * Asymptotic: each of `trials` traces runs burn-in + `steps` steps and the
 * post-burn-in errors of all traces are pooled (batch-means standard error).
 * AtStep{k}: `trials` independent runs of k+1 steps, one sample of e_k each.
 * Trial t uses seed derive_seed(seed, t).
 */
VerificationReport verify_bound(const DisturbanceModel& model, const ControllerPolicy& controller,
                                LpExponent p, const Horizon& horizon, std::size_t steps,
                                std::size_t trials, std::uint64_t seed,
                                const VerifyOptions& options = {});

/// Asymptotic determinant check for vector models: det of the pooled error
/// covariance against mimo_det_bound, plus the per-channel variance product
/// against mimo_product_bound.
VerificationReport verify_mimo_bound(const DisturbanceModel& model,
                                     const ControllerPolicy& controller, std::size_t steps,
                                     std::size_t trials, std::uint64_t seed,
                                     const VerifyOptions& options = {});

/// One row of a sweep.
struct SweepCell {
  std::size_t model_index = 0;
  std::size_t controller_index = 0;
  std::size_t p_index = 0;
  std::size_t seed_index = 0;
  std::string model;
  std::string controller;
  LpExponent p = LpExponent::finite(2.0);
  std::uint64_t seed = 0;
  std::optional<VerificationReport> report;
  /// Set when the cell raised instead of producing a report.
  std::string error;
};

struct SweepSummary {
  std::size_t cells = 0;
  std::size_t violations = 0;
  std::size_t failed_cells = 0;
  /// The gap ratio farthest from 1 on a log scale; 0 when no cell reported.
  double worst_gap_ratio = 0.0;
  double min_gap_ratio = 0.0;
  double max_gap_ratio = 0.0;
  std::int64_t wall_time_ms = 0;
};

struct SweepResult {
  /// Sorted by (model, controller, p, seed) index.
  std::vector<SweepCell> cells;
  std::vector<CausalityAuditReport> causality_failures;
  SweepSummary summary;
};

struct SweepOptions {
  /// 0: hardware concurrency.
  std::size_t threads = 0;
  std::size_t audit_length = 64;
  std::size_t audit_trials = 8;
};

/**
 * Cartesian sweep over models x controllers x p x seeds. Every controller is
 * causality-audited first; failing controllers are reported and skipped.
 * Cells run in parallel, with seeds derived from the master seed and the
 * cell's (model, controller, seed) indices, so results do not depend on the
 * thread count. One simulation serves all exponents of a (model,
 * controller, seed) triple. Vector models produce one determinant row per
 * triple, labelled p = 2.
 */
SweepResult sweep(const ExperimentConfig& config, const SweepOptions& options = {});

/// CSV with columns cell_id, model, controller, p, k_or_asymptotic, h_bits,
/// bound, empirical, std_error, gap_ratio, violation, whiteness_pass,
/// ggfit_pass, mi_lag1_bits, seed, runtime_ms.
std::string sweep_csv(const SweepResult& result);
/// {"cells", "violations", "worst_gap_ratio", "wall_time_ms", ...}.
std::string sweep_summary_json(const SweepSummary& summary, bool include_wall_time = true);

}  // namespace entrolim

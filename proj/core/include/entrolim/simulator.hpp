// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "entrolim/processes.hpp"
#include "entrolim/signal.hpp"

namespace entrolim {

/**
 * A causal feedback map g producing the controller output z_k from the error
 * history e_0..e_{k-1} (and its own past outputs).
 *
 * Policies carry no mutable state: everything they need is passed in as
 * histories, so one instance can drive many traces concurrently and the
 * causality audit can replay arbitrary prefixes.
 */
class ControllerPolicy {
 public:
  virtual ~ControllerPolicy() = default;

  [[nodiscard]] virtual std::size_t dim() const = 0;
  [[nodiscard]] virtual std::string descriptor() const = 0;

  /// z_0, deterministic. Zero unless overridden.
  virtual void initial_output(std::span<double> out) const;

  /// z_k for k >= 1. `errors` and `outputs` hold at least k samples; during
  /// auditing they may extend beyond k, and a strictly causal policy must not
  /// read those entries.
  virtual void step(std::size_t k, SignalView errors, SignalView outputs,
                    std::span<double> out) const = 0;
};

using ControllerPtr = std::shared_ptr<const ControllerPolicy>;

/// Aligned disturbance, control and error sequences of one closed-loop run.
struct SimulationTrace {
  Signal d;
  Signal z;
  Signal e;
  std::uint64_t seed = 0;
  std::string model_descriptor;
  std::string controller_descriptor;

  [[nodiscard]] std::size_t length() const { return e.length(); }
  [[nodiscard]] std::size_t dim() const { return e.dim(); }
};

/// Runs e_k = d_k + z_k, z_k = g(e_0..e_{k-1}) on a fresh sample path of
/// `model`. Deterministic given seed. Throws DimensionError on mismatch.
SimulationTrace run_loop(const DisturbanceModel& model, const ControllerPolicy& controller,
                         std::size_t length, std::uint64_t seed);

/// Same loop driven by an explicit disturbance sequence.
SimulationTrace run_loop(const Signal& disturbance, const ControllerPolicy& controller);

// Built-in policies ---------------------------------------------------------

ControllerPtr zero_controller(std::size_t dim = 1);

/// z_k = value for every k (including z_0).
ControllerPtr constant_controller(double value);

/// z_k = sum_j taps[j-1] e_{k-j}.
ControllerPtr linear_feedback_controller(std::vector<double> taps);

/// Cancels the predictable part of the disturbance: reconstructs
/// d_j = e_j - z_j and outputs z_k = -(best one-step linear prediction of d_k
/// from d_0..d_{k-1}). For finite-order AR models this is the AR recursion
/// once k >= order; for ARMA it uses the Levinson-Durbin predictor of order
/// min(k, model.prediction_order()); for vector AR, z_k = -A d_{k-1}.
/// The resulting error is the disturbance innovation.
ControllerPtr predictor_controller(const DisturbanceModel& model);

/// Saturated random affine map of the last `memory` errors:
/// z_k = clamp(b + W [e_{k-1}; ...; e_{k-memory}], -gain_cap, gain_cap).
/// memory = 0 gives the zero map. Deterministic per seed.
ControllerPtr random_causal_controller(std::uint64_t seed, std::size_t memory,
                                       double gain_cap, std::size_t dim = 1);

struct LearnedControllerOptions {
  /// 1: linear in past disturbances; 2: also their squares.
  int polynomial_degree = 1;
  double ridge_lambda = 1e-8;
};

/// Least-squares policy fitted to training traces: regress -d_k on
/// d_{k-1}..d_{k-memory} and act on disturbances reconstructed as e_j - z_j.
class LearnedController final : public ControllerPolicy {
 public:
  LearnedController(std::span<const SimulationTrace> training, std::size_t memory,
                    LearnedControllerOptions options = {});

  [[nodiscard]] std::size_t dim() const override { return 1; }
  [[nodiscard]] std::string descriptor() const override;
  void step(std::size_t k, SignalView errors, SignalView outputs,
            std::span<double> out) const override;

  /// Fitted weights, linear taps first (lag 1..memory), then squares.
  [[nodiscard]] const std::vector<double>& coefficients() const { return coefficients_; }
  /// Standard errors of the fitted weights (OLS formula).
  [[nodiscard]] const std::vector<double>& standard_errors() const { return standard_errors_; }
  [[nodiscard]] bool used_ridge() const { return used_ridge_; }

 private:
  std::size_t memory_;
  LearnedControllerOptions options_;
  std::vector<double> coefficients_;
  std::vector<double> standard_errors_;
  bool used_ridge_ = false;
};

std::shared_ptr<const LearnedController> learned_controller(
    std::span<const SimulationTrace> training, std::size_t memory,
    LearnedControllerOptions options = {});

/// Known causality violator for exercising the audit: z_k = e_k when the
/// history exposes it, 0 otherwise.
ControllerPtr anticipatory_controller(std::size_t dim = 1);

// Plant / controller composition ------------------------------------------

/// One SISO block of an open loop. A strictly causal block computes y_j from
/// u_0..u_{j-1}; a causal block from u_0..u_j.
class Stage {
 public:
  virtual ~Stage() = default;
  [[nodiscard]] virtual bool strictly_causal() const = 0;
  /// `input` holds u_0..u_{j-1} (strict) or u_0..u_j (causal).
  [[nodiscard]] virtual double output(std::span<const double> input) const = 0;
  [[nodiscard]] virtual std::string descriptor() const = 0;
};

using StagePtr = std::shared_ptr<const Stage>;

/// y_j = gain * u_{j-1}, y_0 = 0.
StagePtr delay_stage(double gain = 1.0);
/// y_j = gain * u_j.
StagePtr gain_stage(double gain);
/// Arbitrary block from a callable on the visible input history.
StagePtr function_stage(bool strictly_causal, std::function<double(std::span<const double>)> fn,
                        std::string descriptor);

enum class CompositionOrder {
  KP,  ///< g = K(P(.)): plant first, then controller.
  PK,  ///< g = P(K(.)): controller first, then plant.
};

/// Composes plant and controller into one strictly causal policy g. At least
/// one stage must be strictly causal; throws InvalidArgument otherwise.
/// Each step recomputes the intermediate signal from the error history, so
/// the cost per step grows linearly with k.
ControllerPtr compose_loop(StagePtr plant, StagePtr controller, CompositionOrder order);

// Causality audit -----------------------------------------------------------

struct CausalityAuditReport {
  bool passed = true;
  std::size_t trials = 0;
  /// For each failing trial, the first step whose output changed.
  std::vector<std::size_t> violating_steps;
  std::string controller_descriptor;
};

/// Replays the policy on `errors` with full (future-exposing) views, perturbs
/// e_k, e_{k+1}, ... and returns the first step j <= k whose output changed.
std::optional<std::size_t> causality_probe(const ControllerPolicy& controller,
                                           const Signal& errors, std::size_t k,
                                           std::uint64_t seed);

/// causality_probe on one random Gaussian error history at `trials` random
/// indices k in [1, length).
CausalityAuditReport causality_audit(const ControllerPolicy& controller, std::size_t length,
                                     std::size_t trials, std::uint64_t seed);

/// Runs the closed loop twice on the same disturbance path, the second time
/// with d_k, d_{k+1}, ... shifted, and checks that z_0..z_k agree exactly.
bool closed_loop_perturbation_check(const DisturbanceModel& model, const ControllerPolicy& controller,
                                    std::size_t length, std::size_t k, std::uint64_t seed);

// Trace serialization -----------------------------------------------------------

/// CSV with header k,d,z,e (k,d_0..d_{m-1},z_0..,e_0.. for m > 1).
void write_trace_csv(const SimulationTrace& trace, const std::string& path);
/// JSON sidecar: seed, model, controller, length, dim, columns.
void write_trace_sidecar(const SimulationTrace& trace, const std::string& path);
/// Reads a CSV written by write_trace_csv; descriptors are left empty.
SimulationTrace read_trace_csv(const std::string& path);

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace entrolim {

SimulationTrace run_loop(const Signal& disturbance, const ControllerPolicy& controller) {
  const std::size_t m = disturbance.dim();
  if (controller.dim() != m) {
    throw DimensionError("controller dimension " + std::to_string(controller.dim()) +
                         " does not match disturbance dimension " + std::to_string(m));
  }
  const std::size_t n = disturbance.length();
  SimulationTrace trace;
  trace.d = disturbance;
  trace.z = Signal(m, n);
  trace.e = Signal(m, n);
  trace.controller_descriptor = controller.descriptor();
  for (std::size_t k = 0; k < n; ++k) {
    auto zk = trace.z.at(k);
    if (k == 0) {
      controller.initial_output(zk);
    } else {
      controller.step(k, trace.e.prefix(k), trace.z.prefix(k), zk);
    }
    const auto dk = trace.d.at(k);
    auto ek = trace.e.at(k);
    for (std::size_t i = 0; i < m; ++i) ek[i] = dk[i] + zk[i];
  }
  return trace;
}

SimulationTrace run_loop(const DisturbanceModel& model, const ControllerPolicy& controller,
                         std::size_t length, std::uint64_t seed) {
  if (controller.dim() != model.dim()) {
    throw DimensionError("controller dimension " + std::to_string(controller.dim()) +
                         " does not match model dimension " + std::to_string(model.dim()));
  }
  SimulationTrace trace = run_loop(model.sample_path(length, seed), controller);
  trace.seed = seed;
  trace.model_descriptor = model.descriptor();
  return trace;
}

namespace {

// Outputs z_0..z_upto with the policy seeing the whole (future-exposing)
// error buffer.
Signal replay(const ControllerPolicy& controller, const Signal& errors, std::size_t upto) {
  Signal z(errors.dim(), errors.length());
  for (std::size_t k = 0; k <= upto; ++k) {
    if (k == 0) {
      controller.initial_output(z.at(0));
    } else {
      controller.step(k, errors.view(), z.view(), z.at(k));
    }
  }
  return z;
}

}  // namespace

std::optional<std::size_t> causality_probe(const ControllerPolicy& controller,
                                           const Signal& errors, std::size_t k,
                                           std::uint64_t seed) {
  if (k >= errors.length()) throw InvalidArgument("causality probe index beyond the history");
  if (controller.dim() != errors.dim()) throw DimensionError("causality probe: dimension mismatch");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Signal perturbed = errors;
  for (std::size_t j = k; j < errors.length(); ++j)
    for (auto& x : perturbed.at(j)) x += 1.0 + std::abs(normal(rng));
  const Signal z_base = replay(controller, errors, k);
  const Signal z = replay(controller, perturbed, k);
  for (std::size_t j = 0; j <= k; ++j) {
    const auto a = z.at(j);
    const auto b = z_base.at(j);
    if (!std::equal(a.begin(), a.end(), b.begin())) return j;
  }
  return std::nullopt;
}

CausalityAuditReport causality_audit(const ControllerPolicy& controller, std::size_t length,
                                     std::size_t trials, std::uint64_t seed) {
  if (length < 2) throw InvalidArgument("causality audit needs length >= 2");
  const std::size_t m = controller.dim();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> pick(1, length - 1);

  Signal base(m, length);
  for (auto& x : base.raw()) x = normal(rng);

  CausalityAuditReport report;
  report.trials = trials;
  report.controller_descriptor = controller.descriptor();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = pick(rng);
    if (const auto bad = causality_probe(controller, base, k, rng()))
      report.violating_steps.push_back(*bad);
  }
  report.passed = report.violating_steps.empty();
  return report;
}

bool closed_loop_perturbation_check(const DisturbanceModel& model, const ControllerPolicy& controller,
                                    std::size_t length, std::size_t k, std::uint64_t seed) {
  if (k >= length) throw InvalidArgument("perturbation index beyond the horizon");
  const Signal d = model.sample_path(length, seed);
  Signal shifted = d;
  Rng rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal;
  for (std::size_t j = k; j < length; ++j)
    for (auto& x : shifted.at(j)) x += 1.0 + std::abs(normal(rng));
  const SimulationTrace a = run_loop(d, controller);
  const SimulationTrace b = run_loop(shifted, controller);
  for (std::size_t j = 0; j <= k; ++j) {
    const auto za = a.z.at(j);
    const auto zb = b.z.at(j);
    if (!std::equal(za.begin(), za.end(), zb.begin())) return false;
  }
  return true;
}

}  // namespace entrolim

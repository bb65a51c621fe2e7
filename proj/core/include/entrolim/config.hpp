// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entrolim/common.hpp"
#include "entrolim/processes.hpp"
#include "entrolim/simulator.hpp"

namespace entrolim {

/// Malformed or invalid experiment configuration. `field` is a JSON path such
/// as "models[1].ar"; `line` is 1-based, or 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, std::size_t line, const std::string& message);
  [[nodiscard]] const std::string& field() const { return field_; }
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

enum class RunMode { bound_only, simulate, verify, sweep };
std::string to_string(RunMode mode);

struct ModelEntry {
  std::string name;
  DisturbanceModel model;
  /// Restricts the exponents evaluated for this model; empty means all of
  /// ExperimentConfig::p_values.
  std::vector<LpExponent> p_values;
};

enum class ControllerKind { zero, predictor, random, learned, constant, linear, anticipatory };
std::string to_string(ControllerKind kind);

/// Controller descriptor. Fields beyond `kind` apply to the kinds noted.
struct ControllerSpec {
  ControllerKind kind = ControllerKind::zero;
  /// random: number of controllers generated.
  std::size_t count = 1;
  /// random: largest memory (controller i uses 1 + i mod memory);
  /// learned: regression memory.
  std::size_t memory = 1;
  /// random: output saturation level.
  double gain_cap = 5.0;
  /// random: base seed; learned: training seed.
  std::uint64_t seed = 0;
  /// constant: output value.
  double value = 0.0;
  /// linear: feedback taps on e_{k-1}, e_{k-2}, ...
  std::vector<double> taps;
  /// learned: polynomial degree, number and length of training traces.
  int degree = 1;
  std::size_t training_traces = 4;
  std::size_t training_length = 20000;

  friend bool operator==(const ControllerSpec&, const ControllerSpec&) = default;
};

struct ExperimentConfig {
  std::vector<ModelEntry> models;
  std::vector<ControllerSpec> controllers;
  std::vector<LpExponent> p_values;
  /// Steps per trace after burn-in.
  std::size_t horizon = 10000;
  /// Independent traces pooled per cell (per-step mode: samples of e_k).
  std::size_t trials = 1;
  /// Seeds per (model, controller, p) cell.
  std::size_t seeds = 1;
  std::uint64_t master_seed = 0;
  std::string output_dir = ".";
  RunMode mode = RunMode::verify;
  /// Per-step verification at this k instead of the asymptotic form.
  std::optional<std::size_t> at_step;
  /// Overrides the default burn-in max(10 x model memory, 1000).
  std::optional<std::size_t> burn_in;
  bool tightness = true;
  std::size_t whiteness_lags = 10;
  /// Measure wall time per cell; off by default so that output files are
  /// reproducible byte for byte.
  bool record_runtime = false;
};

/// Parses and validates a JSON configuration. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

/// Controllers described by `spec`, built for `model`. Learned controllers
/// are trained on fresh zero-controller traces of the model. Throws
/// DimensionError for scalar-only kinds on vector models.
std::vector<ControllerPtr> instantiate_controllers(const ControllerSpec& spec,
                                                   const DisturbanceModel& model);

}  // namespace entrolim

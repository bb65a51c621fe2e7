// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace entrolim {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kMinTightnessSamples = 10000;
constexpr std::size_t kMaxMiSamples = 100000;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

Signal window(const Signal& s, std::size_t from, std::size_t count) {
  const auto first = s.raw().begin() + static_cast<std::ptrdiff_t>(from * s.dim());
  return Signal(s.dim(), std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * s.dim())));
}

/// Whiteness and the lag-1 information pair; the density fit is filled in
/// per exponent by the caller.
TightnessReport tightness_base(const SimulationTrace& trace, const TightnessOptions& options) {
  if (trace.dim() != 1) throw DimensionError("tightness report needs a scalar trace");
  if (trace.length() < options.skip + kMinTightnessSamples)
    throw InvalidArgument("tightness report needs at least 10^4 samples after the transient");
  const std::size_t n = trace.length() - options.skip;
  const std::span<const double> e(trace.e.raw().data() + options.skip, n);

  TightnessReport out;
  out.whiteness = whiteness_stats(e, options.max_lag, options.seed, 0);

  const std::size_t pairs = std::min(n - 1, kMaxMiSamples);
  const Signal current = window(trace.e, options.skip + 1, pairs);
  out.mi_error_lag1 =
      mutual_information_estimate(current, window(trace.e, options.skip, pairs), 4, options.seed);
  out.mi_error_past_disturbance = mutual_information_estimate(
      current, window(trace.d, options.skip, pairs), 4, derive_seed(options.seed, 1));
  out.whiteness.mi_lag1_bits = out.mi_error_lag1.value_bits;
  out.whiteness.mi_lag1_std_error = out.mi_error_lag1.std_error_bits;
  return out;
}

void finish_tightness(TightnessReport& t, const SimulationTrace& trace, std::size_t skip, LpExponent p) {
  const std::span<const double> e(trace.e.raw().data() + skip, trace.length() - skip);
  t.density_fit = density_fit_gg(e, p);
}

std::vector<SimulationTrace> simulate_trials(const DisturbanceModel& model,
                                             const ControllerPolicy& controller, std::size_t length,
                                             std::size_t trials, std::uint64_t seed) {
  std::vector<SimulationTrace> traces;
  traces.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t)
    traces.push_back(run_loop(model, controller, length, derive_seed(seed, t)));
  return traces;
}

std::vector<double> pooled_errors(const std::vector<SimulationTrace>& traces, std::size_t skip) {
  std::vector<double> out;
  for (const auto& tr : traces) out.insert(out.end(), tr.e.raw().begin() + static_cast<std::ptrdiff_t>(skip), tr.e.raw().end());
  return out;
}

void compare(VerificationReport& r) {
  r.gap_ratio = r.empirical_norm / r.bound.bound_value;
  r.violation = r.empirical_norm < r.bound.bound_value - 3.0 * r.std_error;
}

/// Asymptotic scalar report from already simulated traces.
VerificationReport asymptotic_report(const DisturbanceModel& model,
                                     const std::vector<SimulationTrace>& traces, std::size_t burn,
                                     LpExponent p, const std::optional<TightnessReport>& base) {
  VerificationReport r;
  r.bound = lp_bound_asymptotic(model, p);
  const std::vector<double> e = pooled_errors(traces, burn);
  const std::size_t batches = std::min<std::size_t>(20 * traces.size(), std::max<std::size_t>(e.size() / 50, 2));
  const NormEstimate est = lp_norm_estimate(e, p, batches);
  r.empirical_norm = est.value;
  r.std_error = est.std_error;
  r.downward_biased = est.downward_biased;
  compare(r);
  if (base) {
    r.tightness = *base;
    finish_tightness(*r.tightness, traces.front(), burn, p);
    r.whiteness_caveat = !r.tightness->whiteness_pass();
  }
  for (const auto& tr : traces) r.seeds.push_back(tr.seed);
  r.model_descriptor = model.descriptor();
  r.controller_descriptor = traces.front().controller_descriptor;
  return r;
}

std::optional<TightnessReport> maybe_tightness(const SimulationTrace& trace, std::size_t burn,
                                               std::size_t steps, const VerifyOptions& options,
                                               std::uint64_t seed) {
  if (!options.tightness || steps < kMinTightnessSamples || steps < 100 * options.whiteness_lags)
    return std::nullopt;
  return tightness_base(trace, {.max_lag = options.whiteness_lags, .skip = burn,
                                .seed = derive_seed(seed, 0x7167)});
}

VerificationReport at_step_report(const DisturbanceModel& model, const ControllerPolicy& controller,
                                  LpExponent p, std::size_t k, std::size_t trials, std::uint64_t seed) {
  VerificationReport r;
  r.bound = lp_bound_at_step(model, p, k);
  std::vector<double> samples;
  samples.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, t);
    samples.push_back(run_loop(model, controller, k + 1, s).e.scalar(k));
    r.seeds.push_back(s);
  }
  const NormEstimate est = lp_norm_estimate(samples, p);
  r.empirical_norm = est.value;
  r.std_error = est.std_error;
  r.downward_biased = est.downward_biased;
  compare(r);
  r.model_descriptor = model.descriptor();
  r.controller_descriptor = controller.descriptor();
  return r;
}

/// Determinant and product checks on pooled vector errors.
VerificationReport mimo_report(const DisturbanceModel& model, const std::vector<SimulationTrace>& traces,
                               std::size_t burn, std::uint64_t seed) {
  const std::size_t m = model.dim();
  std::vector<double> raw;
  for (const auto& tr : traces)
    raw.insert(raw.end(), tr.e.raw().begin() + static_cast<std::ptrdiff_t>(burn * m), tr.e.raw().end());
  const Signal e(m, std::move(raw));

  VerificationReport r;
  r.bound = mimo_bound(model, Asymptotic{}, BoundForm::mimo_det);
  const DeterminantEstimate det = covariance_det_estimate(e, derive_seed(seed, 0xde7));
  r.empirical_norm = det.det;
  r.std_error = det.std_error;
  compare(r);

  MimoProductCheck prod;
  prod.bound = mimo_bound(model, Asymptotic{}, BoundForm::mimo_product);
  prod.empirical = 1.0;
  double rel2 = 0.0;
  const auto n = static_cast<double>(e.length());
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double> ch = e.channel(i);
    double mean = 0.0;
    for (double x : ch) mean += x;
    mean /= n;
    double var = 0.0, fourth = 0.0;
    for (double x : ch) {
      const double d2 = (x - mean) * (x - mean);
      var += d2;
      fourth += d2 * d2;
    }
    var /= n - 1.0;
    const double var_of_sq = std::max(fourth / n - var * var, 0.0);
    rel2 += var_of_sq / n / (var * var);
    prod.empirical *= var;
  }
  prod.std_error = prod.empirical * std::sqrt(rel2);
  prod.gap_ratio = prod.empirical / prod.bound.bound_value;
  prod.violation = prod.empirical < prod.bound.bound_value - 3.0 * prod.std_error;
  r.mimo_product = prod;
  r.violation = r.violation || prod.violation;

  for (const auto& tr : traces) r.seeds.push_back(tr.seed);
  r.model_descriptor = model.descriptor();
  r.controller_descriptor = traces.front().controller_descriptor;
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

bool TightnessReport::mi_identity_holds() const {
  const double combined = std::hypot(mi_error_lag1.std_error_bits, mi_error_past_disturbance.std_error_bits);
  return std::abs(mi_error_lag1.value_bits - mi_error_past_disturbance.value_bits) <= 3.0 * combined;
}

TightnessReport tightness_report(const SimulationTrace& trace, LpExponent p, const TightnessOptions& options) {
  TightnessReport t = tightness_base(trace, options);
  finish_tightness(t, trace, options.skip, p);
  return t;
}

std::size_t default_burn_in(const DisturbanceModel& model) {
  return std::max<std::size_t>(10 * model.effective_memory(), 1000);
}

VerificationReport verify_bound(const DisturbanceModel& model, const ControllerPolicy& controller,
                                LpExponent p, const Horizon& horizon, std::size_t steps,
                                std::size_t trials, std::uint64_t seed, const VerifyOptions& options) {
  const auto start = Clock::now();
  if (model.dim() != 1) throw DimensionError("verify_bound needs a scalar model; use verify_mimo_bound");
  if (controller.dim() != 1) throw DimensionError("verify_bound: controller dimension mismatch");
  if (trials == 0) throw InvalidArgument("verify_bound: trials must be positive");

  VerificationReport r;
  if (const auto* at = std::get_if<AtStep>(&horizon)) {
    if (trials < 2) throw InvalidArgument("per-step verification needs at least 2 trials");
    r = at_step_report(model, controller, p, at->k, trials, seed);
  } else {
    if (steps == 0) throw InvalidArgument("verify_bound: steps must be positive");
    const std::size_t burn = options.burn_in > 0 ? options.burn_in : default_burn_in(model);
    const auto traces = simulate_trials(model, controller, burn + steps, trials, seed);
    r = asymptotic_report(model, traces, burn, p, maybe_tightness(traces.front(), burn, steps, options, seed));
  }
  if (options.record_runtime) r.runtime_ms = elapsed_ms(start);
  return r;
}

VerificationReport verify_mimo_bound(const DisturbanceModel& model, const ControllerPolicy& controller,
                                     std::size_t steps, std::size_t trials, std::uint64_t seed,
                                     const VerifyOptions& options) {
  const auto start = Clock::now();
  if (model.dim() < 2) throw DimensionError("verify_mimo_bound needs a vector model with m >= 2");
  if (controller.dim() != model.dim()) throw DimensionError("verify_mimo_bound: controller dimension mismatch");
  if (trials == 0 || steps == 0) throw InvalidArgument("verify_mimo_bound: trials and steps must be positive");
  const std::size_t burn = options.burn_in > 0 ? options.burn_in : default_burn_in(model);
  const auto traces = simulate_trials(model, controller, burn + steps, trials, seed);
  VerificationReport r = mimo_report(model, traces, burn, seed);
  if (options.record_runtime) r.runtime_ms = elapsed_ms(start);
  return r;
}

SweepResult sweep(const ExperimentConfig& config, const SweepOptions& options) {
  const auto start = Clock::now();
  SweepResult result;

  // Expand controller specs per model; indices are shared across models.
  struct Instance {
    ControllerPtr controller;
    std::string error;
  };
  std::vector<std::vector<Instance>> instances(config.models.size());
  std::size_t controller_count = 0;
  for (const auto& spec : config.controllers)
    controller_count += spec.kind == ControllerKind::random ? spec.count : 1;

  for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
    const DisturbanceModel& model = config.models[mi].model;
    for (const auto& spec : config.controllers) {
      const std::size_t count = spec.kind == ControllerKind::random ? spec.count : 1;
      try {
        for (auto& c : instantiate_controllers(spec, model)) {
          Instance inst{c, {}};
          const auto audit = causality_audit(*c, options.audit_length, options.audit_trials,
                                             derive_seed(config.master_seed, 0xca05a1));
          if (!audit.passed) {
            inst.error = "causality audit failed";
            if (std::none_of(result.causality_failures.begin(), result.causality_failures.end(),
                             [&](const auto& f) { return f.controller_descriptor == audit.controller_descriptor; }))
              result.causality_failures.push_back(audit);
          }
          instances[mi].push_back(std::move(inst));
        }
      } catch (const Error& e) {
        for (std::size_t i = 0; i < count; ++i) instances[mi].push_back({nullptr, e.what()});
      }
    }
  }

  struct Job {
    std::size_t model_index;
    std::size_t controller_index;
    std::size_t seed_index;
  };
  std::vector<Job> jobs;
  for (std::size_t mi = 0; mi < config.models.size(); ++mi)
    for (std::size_t ci = 0; ci < controller_count; ++ci)
      for (std::size_t si = 0; si < config.seeds; ++si) jobs.push_back({mi, ci, si});

  std::vector<std::vector<SweepCell>> job_cells(jobs.size());
  auto run_job = [&](std::size_t j) {
    const auto job_start = Clock::now();
    const Job& job = jobs[j];
    const ModelEntry& entry = config.models[job.model_index];
    const DisturbanceModel& model = entry.model;
    const Instance& inst = instances[job.model_index][job.controller_index];
    const std::uint64_t seed = derive_seed(
        derive_seed(derive_seed(config.master_seed, job.model_index), job.controller_index), job.seed_index);
    const std::string model_label = entry.name.empty() ? model.descriptor() : entry.name;

    std::vector<LpExponent> ps = entry.p_values.empty() ? config.p_values : entry.p_values;
    if (model.dim() > 1) ps = {LpExponent::finite(2.0)};
    auto& cells = job_cells[j];
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      SweepCell cell;
      cell.model_index = job.model_index;
      cell.controller_index = job.controller_index;
      cell.p_index = pi;
      cell.seed_index = job.seed_index;
      cell.model = model_label;
      cell.controller = inst.controller ? inst.controller->descriptor() : "unavailable";
      cell.p = ps[pi];
      cell.seed = seed;
      cell.error = inst.error;
      cells.push_back(std::move(cell));
    }
    if (!inst.error.empty()) return;

    try {
      const VerifyOptions vopt{.burn_in = config.burn_in.value_or(0),
                               .tightness = config.tightness,
                               .whiteness_lags = config.whiteness_lags,
                               .record_runtime = false};
      if (model.dim() > 1) {
        cells[0].report = verify_mimo_bound(model, *inst.controller, config.horizon, config.trials, seed, vopt);
      } else if (config.at_step) {
        for (auto& cell : cells) {
          try {
            cell.report = verify_bound(model, *inst.controller, cell.p, AtStep{*config.at_step},
                                       config.horizon, config.trials, seed, vopt);
          } catch (const Error& e) {
            cell.error = e.what();
          }
        }
      } else {
        const std::size_t burn = vopt.burn_in > 0 ? vopt.burn_in : default_burn_in(model);
        const auto traces = simulate_trials(model, *inst.controller, burn + config.horizon, config.trials, seed);
        const auto base = maybe_tightness(traces.front(), burn, config.horizon, vopt, seed);
        for (auto& cell : cells) {
          try {
            cell.report = asymptotic_report(model, traces, burn, cell.p, base);
          } catch (const Error& e) {
            cell.error = e.what();
          }
        }
      }
    } catch (const Error& e) {
      for (auto& cell : cells) cell.error = e.what();
    }
    if (config.record_runtime) {
      const std::int64_t ms = elapsed_ms(job_start);
      for (auto& cell : cells)
        if (cell.report) cell.report->runtime_ms = ms;
    }
  };

  std::size_t threads = options.threads > 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs.size(), 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(j);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& cells : job_cells)
    for (auto& cell : cells) result.cells.push_back(std::move(cell));
  std::sort(result.cells.begin(), result.cells.end(), [](const SweepCell& a, const SweepCell& b) {
    return std::tie(a.model_index, a.controller_index, a.p_index, a.seed_index) <
           std::tie(b.model_index, b.controller_index, b.p_index, b.seed_index);
  });

  SweepSummary& s = result.summary;
  s.cells = result.cells.size();
  double worst_log = -1.0;
  bool any = false;
  for (const auto& cell : result.cells) {
    if (!cell.report) {
      ++s.failed_cells;
      continue;
    }
    const double g = cell.report->gap_ratio;
    if (cell.report->violation) ++s.violations;
    if (!any) {
      s.min_gap_ratio = s.max_gap_ratio = g;
      any = true;
    }
    s.min_gap_ratio = std::min(s.min_gap_ratio, g);
    s.max_gap_ratio = std::max(s.max_gap_ratio, g);
    const double lg = std::abs(std::log(g));
    if (lg > worst_log) {
      worst_log = lg;
      s.worst_gap_ratio = g;
    }
  }
  s.wall_time_ms = elapsed_ms(start);
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "cell_id,model,controller,p,k_or_asymptotic,h_bits,bound,empirical,std_error,gap_ratio,"
         "violation,whiteness_pass,ggfit_pass,mi_lag1_bits,seed,runtime_ms\n";
  auto flag = [](bool b) { return b ? "true" : "false"; };
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const SweepCell& c = result.cells[i];
    out << i << ',' << csv_field(c.model) << ',' << csv_field(c.controller) << ',' << c.p.to_string() << ',';
    if (!c.report) {
      out << ",,,,,,,,,," << c.seed << ",0\n";
      continue;
    }
    const VerificationReport& r = *c.report;
    out << horizon_label(r.bound.horizon) << ',' << format_double(r.bound.conditional_entropy_bits) << ','
        << format_double(r.bound.bound_value) << ',' << format_double(r.empirical_norm) << ','
        << format_double(r.std_error) << ',' << format_double(r.gap_ratio) << ',' << flag(r.violation) << ',';
    if (r.tightness) {
      out << flag(r.tightness->whiteness_pass()) << ',' << flag(r.tightness->ggfit_pass()) << ','
          << format_double(r.tightness->whiteness.mi_lag1_bits) << ',';
    } else {
      out << ",,,";
    }
    out << c.seed << ',' << r.runtime_ms << '\n';
  }
  return out.str();
}

std::string sweep_summary_json(const SweepSummary& s, bool include_wall_time) {
  nlohmann::ordered_json j;
  j["cells"] = s.cells;
  j["violations"] = s.violations;
  j["worst_gap_ratio"] = s.worst_gap_ratio;
  if (include_wall_time) j["wall_time_ms"] = s.wall_time_ms;
  j["failed_cells"] = s.failed_cells;
  j["min_gap_ratio"] = s.min_gap_ratio;
  j["max_gap_ratio"] = s.max_gap_ratio;
  return j.dump(2) + "\n";
}

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim_cli/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "entrolim/bounds.hpp"
#include "entrolim/config.hpp"
#include "entrolim/simulator.hpp"
#include "entrolim/verify.hpp"

namespace entrolim::cli {
namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Experiment configuration (JSON)")->required();
  cmd->add_option("--seed", flags.seed, "Override master_seed");
  cmd->add_option("--out", flags.out_dir, "Override output_dir");
  cmd->add_option("--threads", flags.threads, "Worker threads (default: ENTROLIM_THREADS or all cores)");
}

ExperimentConfig load(const CommonFlags& flags) {
  ExperimentConfig config = load_config(flags.config_path);
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.out_dir) config.output_dir = *flags.out_dir;
  return config;
}

std::size_t resolve_threads(const CommonFlags& flags) {
  if (flags.threads) return *flags.threads;
  if (const char* env = std::getenv("ENTROLIM_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
      throw ConfigError("ENTROLIM_THREADS", 0, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  return 0;
}

std::filesystem::path prepare_output_dir(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string model_label(const ModelEntry& entry) {
  return entry.name.empty() ? entry.model.descriptor() : entry.name;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Subcommands ------------------------------------------------------------------

int cmd_bound(const ExperimentConfig& config, std::ostream& out) {
  std::ostringstream csv;
  csv << "model,p,h_bits,C_p,direct,spectral,gw\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %-5s %14s %14s %16s %16s %16s\n", "model", "p", "h_bits", "C_p",
                "direct", "spectral", "gw");
  out << line;
  for (const auto& entry : config.models) {
    const DisturbanceModel& model = entry.model;
    const std::string label = model_label(entry);
    if (model.dim() > 1) {
      const BoundReport det = mimo_bound(model, Asymptotic{}, BoundForm::mimo_det);
      csv << csv_quote(label) << ",det," << format_double(det.conditional_entropy_bits) << ','
          << format_double(det.constant_cp) << ',' << format_double(det.bound_value) << ",,\n";
      std::snprintf(line, sizeof line, "%-40s %-5s %14.8f %14.8f %16.10g %16s %16s\n", label.c_str(), "det",
                    det.conditional_entropy_bits, det.constant_cp, det.bound_value, "-", "-");
      out << line;
      continue;
    }
    const auto& ps = entry.p_values.empty() ? config.p_values : entry.p_values;
    for (const LpExponent& p : ps) {
      const BoundReport direct = lp_bound_asymptotic(model, p);
      const BoundReport spectral = spectral_lp_bound(model, p);
      const BoundReport gw = gw_lp_bound(model, p);
      csv << csv_quote(label) << ',' << p.to_string() << ',' << format_double(direct.conditional_entropy_bits)
          << ',' << format_double(direct.constant_cp) << ',' << format_double(direct.bound_value) << ','
          << format_double(spectral.bound_value) << ',' << format_double(gw.bound_value) << '\n';
      std::snprintf(line, sizeof line, "%-40s %-5s %14.8f %14.8f %16s %16s %16s\n", label.c_str(),
                    p.to_string().c_str(), direct.conditional_entropy_bits, direct.constant_cp,
                    fixed(direct.bound_value).c_str(), fixed(spectral.bound_value).c_str(),
                    fixed(gw.bound_value).c_str());
      out << line;
    }
  }
  write_file(prepare_output_dir(config) / "bounds.csv", csv.str());
  return kOk;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const auto dir = prepare_output_dir(config);
  std::size_t files = 0;
  for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
    const DisturbanceModel& model = config.models[mi].model;
    std::size_t ci = 0;
    for (const auto& spec : config.controllers) {
      std::vector<ControllerPtr> controllers;
      try {
        controllers = instantiate_controllers(spec, model);
      } catch (const DimensionError& e) {
        err << "warning: models[" << mi << "]: " << e.what() << '\n';
        ci += spec.kind == ControllerKind::random ? spec.count : 1;
        continue;
      }
      for (const auto& c : controllers) {
        for (std::size_t si = 0; si < config.seeds; ++si) {
          const std::uint64_t seed =
              derive_seed(derive_seed(derive_seed(config.master_seed, mi), ci), si);
          const SimulationTrace trace = run_loop(model, *c, config.horizon, seed);
          const std::string stem =
              "trace_m" + std::to_string(mi) + "_c" + std::to_string(ci) + "_s" + std::to_string(si);
          write_trace_csv(trace, (dir / (stem + ".csv")).string());
          write_trace_sidecar(trace, (dir / (stem + ".json")).string());
          ++files;
        }
        ++ci;
      }
    }
  }
  out << "wrote " << files << " traces to " << dir.string() << '\n';
  return kOk;
}

int cmd_sweep(const ExperimentConfig& config, std::size_t threads, const std::string& stem,
              std::ostream& out, std::ostream& err) {
  const auto dir = prepare_output_dir(config);
  const SweepResult result = sweep(config, {.threads = threads});
  write_file(dir / (stem + ".csv"), sweep_csv(result));
  const std::string summary = sweep_summary_json(result.summary);
  write_file(dir / (stem + "_summary.json"), summary);
  out << summary;

  for (const auto& cell : result.cells)
    if (!cell.report && cell.error != "causality audit failed")
      err << "cell " << cell.model << " / " << cell.controller << " / p=" << cell.p.to_string()
          << " failed: " << cell.error << '\n';
  for (const auto& f : result.causality_failures)
    err << "causality audit FAILED: " << f.controller_descriptor << " (" << f.violating_steps.size()
        << "/" << f.trials << " probes changed past outputs)\n";

  if (!result.causality_failures.empty()) return kCausalityViolation;
  if (result.summary.violations > 0) {
    err << result.summary.violations << " bound violation(s)\n";
    return kBoundViolation;
  }
  return kOk;
}

int cmd_audit(const ExperimentConfig& config, std::ostream& out) {
  std::set<std::string> seen;
  bool failed = false;
  for (const auto& entry : config.models) {
    for (const auto& spec : config.controllers) {
      std::vector<ControllerPtr> controllers;
      try {
        controllers = instantiate_controllers(spec, entry.model);
      } catch (const DimensionError&) {
        continue;
      }
      for (const auto& c : controllers) {
        const std::string key = model_label(entry) + " / " + c->descriptor();
        if (!seen.insert(key).second) continue;
        const auto report = causality_audit(*c, 64, 32, derive_seed(config.master_seed, seen.size()));
        failed = failed || !report.passed;
        out << (report.passed ? "PASS " : "FAIL ") << key;
        if (!report.passed) out << " (" << report.violating_steps.size() << "/" << report.trials << " probes)";
        out << '\n';
      }
    }
  }
  return failed ? kCausalityViolation : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy lower bounds on feedback control errors: bounds, simulation and Monte Carlo checks",
               "entrolim"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto* bound = app.add_subcommand("bound", "Print the three bound forms per model and p");
  auto* simulate = app.add_subcommand("simulate", "Write closed-loop traces as CSV");
  auto* verify = app.add_subcommand("verify", "Compare empirical error norms with the bounds");
  auto* sweep_cmd = app.add_subcommand("sweep", "Parallel verification over the full Cartesian grid");
  auto* audit = app.add_subcommand("audit", "Check that every configured controller is strictly causal");
  for (auto* cmd : {bound, simulate, verify, sweep_cmd, audit}) add_common(cmd, flags);

  std::vector<std::string> argv_storage = args.empty() ? std::vector<std::string>{"entrolim"} : args;
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  try {
    const ExperimentConfig config = load(flags);
    const std::size_t threads = resolve_threads(flags);
    if (*bound) return cmd_bound(config, out);
    if (*simulate) return cmd_simulate(config, out, err);
    if (*verify) return cmd_sweep(config, threads, "verify", out, err);
    if (*sweep_cmd) return cmd_sweep(config, threads, "sweep", out, err);
    if (*audit) return cmd_audit(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace entrolim::cli

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace entrolim {
namespace {

using nlohmann::json;

/// Line of the only occurrence of "key" in the source, 0 if absent or
/// ambiguous.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  if (key.empty()) return 0;
  const std::string quoted = "\"" + key + "\"";
  const std::size_t pos = text.find(quoted);
  if (pos == std::string::npos || text.find(quoted, pos + 1) != std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& key, const std::string& message) const {
    throw ConfigError(path, line_of_key(text_, key), message);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "", "expected an object");
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        fail(join(path, key), key, "unknown field");
    }
  }

  double number(const json& obj, const std::string& path, const std::string& key) const {
    const json& v = require(obj, path, key);
    if (!v.is_number()) fail(join(path, key), key, "expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_int(const json& v, const std::string& path, const std::string& key) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      fail(path, key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::uint64_t unsigned_field(const json& obj, const std::string& path, const std::string& key) const {
    return unsigned_int(require(obj, path, key), join(path, key), key);
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const std::string& key) const {
    const std::string here = join(path, key);
    if (!obj.contains(key)) return {};
    const json& v = obj.at(key);
    if (!v.is_array()) fail(here, key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(here + "[" + std::to_string(i) + "]", key, "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Eigen::MatrixXd matrix(const json& obj, const std::string& path, const std::string& key) const {
    const std::string here = join(path, key);
    const json& v = require(obj, path, key);
    if (!v.is_array() || v.empty()) fail(here, key, "expected a non-empty array of rows");
    const std::size_t rows = v.size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string row_path = here + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != rows) fail(row_path, key, "expected a square matrix");
      for (std::size_t j = 0; j < rows; ++j) {
        if (!v[i][j].is_number()) fail(row_path + "[" + std::to_string(j) + "]", key, "expected a number");
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
      }
    }
    return m;
  }

  std::string string(const json& obj, const std::string& path, const std::string& key) const {
    const json& v = require(obj, path, key);
    if (!v.is_string()) fail(join(path, key), key, "expected a string");
    return v.get<std::string>();
  }

  LpExponent exponent(const json& v, const std::string& path, const std::string& key) const {
    try {
      if (v.is_string()) return LpExponent::parse(v.get<std::string>());
      if (v.is_number()) return LpExponent::finite(v.get<double>());
    } catch (const InvalidArgument& e) {
      fail(path, key, e.what());
    }
    fail(path, key, "expected a number >= 1 or \"inf\"");
  }

  std::vector<LpExponent> exponents(const json& obj, const std::string& path, const std::string& key) const {
    const std::string here = join(path, key);
    const json& v = obj.at(key);
    if (!v.is_array()) fail(here, key, "expected an array");
    std::vector<LpExponent> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(exponent(v[i], here + "[" + std::to_string(i) + "]", key));
    return out;
  }

  const json& require(const json& obj, const std::string& path, const std::string& key) const {
    if (!obj.contains(key)) fail(join(path, key), key, "missing required field");
    return obj.at(key);
  }

 private:
  const std::string& text_;
};

GeneralizedGaussian parse_innovation(const Reader& r, const json& j, const std::string& path) {
  const std::string family = r.string(j, path, "family");
  try {
    if (family == "gaussian") {
      r.check_keys(j, path, {"family", "variance"});
      return GeneralizedGaussian::gaussian(r.number(j, path, "variance"));
    }
    if (family == "laplace") {
      r.check_keys(j, path, {"family", "mu"});
      return GeneralizedGaussian::laplace(r.number(j, path, "mu"));
    }
    if (family == "uniform") {
      r.check_keys(j, path, {"family", "half_width"});
      return GeneralizedGaussian::uniform(r.number(j, path, "half_width"));
    }
    if (family == "gg") {
      r.check_keys(j, path, {"family", "p", "mu"});
      return GeneralizedGaussian(r.exponent(r.require(j, path, "p"), Reader::join(path, "p"), "p"),
                                 r.number(j, path, "mu"));
    }
  } catch (const InvalidArgument& e) {
    r.fail(path, "innovation", e.what());
  }
  r.fail(Reader::join(path, "family"), "family",
         "unknown innovation family '" + family + "' (gaussian, laplace, uniform, gg)");
}

ModelEntry parse_model(const Reader& r, const json& j, const std::string& path) {
  r.check_keys(j, path, {"name", "kind", "ar", "ma", "innovation_variance", "innovation",
                         "transition", "innovation_covariance", "p_values"});
  const std::string kind = r.string(j, path, "kind");
  auto build = [&]() -> DisturbanceModel {
    try {
      if (kind == "iid")
        return DisturbanceModel::iid(parse_innovation(r, r.require(j, path, "innovation"),
                                                      Reader::join(path, "innovation")));
      if (kind == "gauss_arma")
        return DisturbanceModel::gauss_arma(r.numbers(j, path, "ar"), r.numbers(j, path, "ma"),
                                            j.contains("innovation_variance")
                                                ? r.number(j, path, "innovation_variance")
                                                : 1.0);
      if (kind == "gen_gauss_ar")
        return DisturbanceModel::gen_gauss_ar(
            r.numbers(j, path, "ar"),
            parse_innovation(r, r.require(j, path, "innovation"), Reader::join(path, "innovation")));
      if (kind == "vector_gauss_ar")
        return DisturbanceModel::vector_gauss_ar(r.matrix(j, path, "transition"),
                                                 r.matrix(j, path, "innovation_covariance"));
    } catch (const InvalidArgument& e) {
      r.fail(path, "kind", e.what());
    } catch (const DimensionError& e) {
      r.fail(path, "kind", e.what());
    }
    r.fail(Reader::join(path, "kind"), "kind",
           "unknown model kind '" + kind + "' (iid, gauss_arma, gen_gauss_ar, vector_gauss_ar)");
  };
  ModelEntry entry{j.contains("name") ? r.string(j, path, "name") : std::string{}, build(), {}};
  if (j.contains("p_values")) entry.p_values = r.exponents(j, path, "p_values");
  return entry;
}

ControllerKind controller_kind(const Reader& r, const std::string& text, const std::string& path) {
  for (auto k : {ControllerKind::zero, ControllerKind::predictor, ControllerKind::random,
                 ControllerKind::learned, ControllerKind::constant, ControllerKind::linear,
                 ControllerKind::anticipatory})
    if (to_string(k) == text) return k;
  r.fail(path, "kind", "unknown controller kind '" + text + "'");
}

ControllerSpec parse_controller(const Reader& r, const json& j, const std::string& path) {
  r.check_keys(j, path, {"kind", "count", "memory", "gain_cap", "seed", "value", "taps", "degree",
                         "training_traces", "training_length"});
  ControllerSpec c;
  c.kind = controller_kind(r, r.string(j, path, "kind"), Reader::join(path, "kind"));
  if (j.contains("count")) c.count = r.unsigned_field(j, path, "count");
  if (j.contains("memory")) c.memory = r.unsigned_field(j, path, "memory");
  if (j.contains("gain_cap")) c.gain_cap = r.number(j, path, "gain_cap");
  if (j.contains("seed")) c.seed = r.unsigned_field(j, path, "seed");
  if (j.contains("value")) c.value = r.number(j, path, "value");
  c.taps = r.numbers(j, path, "taps");
  if (j.contains("degree")) c.degree = static_cast<int>(r.unsigned_field(j, path, "degree"));
  if (j.contains("training_traces")) c.training_traces = r.unsigned_field(j, path, "training_traces");
  if (j.contains("training_length")) c.training_length = r.unsigned_field(j, path, "training_length");

  if (c.kind == ControllerKind::random) {
    if (c.memory == 0) r.fail(Reader::join(path, "memory"), "memory", "random controllers need memory >= 1");
    if (!(c.gain_cap > 0.0)) r.fail(Reader::join(path, "gain_cap"), "gain_cap", "must be positive");
  }
  if (c.kind == ControllerKind::learned) {
    if (c.degree < 1 || c.degree > 2) r.fail(Reader::join(path, "degree"), "degree", "must be 1 or 2");
    if (c.training_traces == 0 || c.training_length <= 10 * (c.memory + 1))
      r.fail(Reader::join(path, "training_length"), "training_length", "too little training data");
  }
  return c;
}

RunMode parse_mode(const Reader& r, const std::string& text) {
  for (auto m : {RunMode::bound_only, RunMode::simulate, RunMode::verify, RunMode::sweep})
    if (to_string(m) == text) return m;
  r.fail("mode", "mode", "unknown mode '" + text + "' (bound_only, simulate, verify, sweep)");
}

json exponent_json(LpExponent p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json innovation_json(const GeneralizedGaussian& g) {
  return {{"family", "gg"}, {"p", exponent_json(g.p())}, {"mu", g.mu()}};
}

json model_json(const ModelEntry& entry) {
  json j;
  if (!entry.name.empty()) j["name"] = entry.name;
  const ModelSpec& spec = entry.model.spec();
  if (const auto* s = std::get_if<IidSpec>(&spec)) {
    j["kind"] = "iid";
    j["innovation"] = innovation_json(s->innovation);
  } else if (const auto* s = std::get_if<GaussArmaSpec>(&spec)) {
    j["kind"] = "gauss_arma";
    j["ar"] = s->ar;
    j["ma"] = s->ma;
    j["innovation_variance"] = s->innovation_variance;
  } else if (const auto* s = std::get_if<GenGaussArSpec>(&spec)) {
    j["kind"] = "gen_gauss_ar";
    j["ar"] = s->ar;
    j["innovation"] = innovation_json(s->innovation);
  } else if (const auto* s = std::get_if<VectorGaussArSpec>(&spec)) {
    j["kind"] = "vector_gauss_ar";
    j["transition"] = matrix_json(s->transition);
    j["innovation_covariance"] = matrix_json(s->innovation_covariance);
  }
  if (!entry.p_values.empty()) {
    json ps = json::array();
    for (const auto& p : entry.p_values) ps.push_back(exponent_json(p));
    j["p_values"] = ps;
  }
  return j;
}

json controller_json(const ControllerSpec& c) {
  json j{{"kind", to_string(c.kind)}};
  switch (c.kind) {
    case ControllerKind::random:
      j["count"] = c.count;
      j["memory"] = c.memory;
      j["gain_cap"] = c.gain_cap;
      j["seed"] = c.seed;
      break;
    case ControllerKind::learned:
      j["memory"] = c.memory;
      j["degree"] = c.degree;
      j["seed"] = c.seed;
      j["training_traces"] = c.training_traces;
      j["training_length"] = c.training_length;
      break;
    case ControllerKind::constant:
      j["value"] = c.value;
      break;
    case ControllerKind::linear:
      j["taps"] = c.taps;
      break;
    default:
      break;
  }
  return j;
}

}  // namespace

ConfigError::ConfigError(std::string field, std::size_t line, const std::string& message)
    : Error((field.empty() ? std::string("config") : field) +
            (line > 0 ? " (line " + std::to_string(line) + ")" : std::string{}) + ": " + message),
      field_(std::move(field)),
      line_(line) {}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::bound_only: return "bound_only";
    case RunMode::simulate: return "simulate";
    case RunMode::verify: return "verify";
    case RunMode::sweep: return "sweep";
  }
  return "verify";
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::zero: return "zero";
    case ControllerKind::predictor: return "predictor";
    case ControllerKind::random: return "random";
    case ControllerKind::learned: return "learned";
    case ControllerKind::constant: return "constant";
    case ControllerKind::linear: return "linear";
    case ControllerKind::anticipatory: return "anticipatory";
  }
  return "zero";
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, json_text.size());
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(json_text.begin(), json_text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigError("", line, std::string("malformed JSON: ") + e.what());
  }
  const Reader r(json_text);
  r.check_keys(doc, "", {"models", "controllers", "p_values", "horizon", "trials", "seeds",
                         "master_seed", "output_dir", "mode", "at_step", "burn_in", "tightness",
                         "whiteness_lags", "record_runtime"});
  ExperimentConfig c;

  const json& models = r.require(doc, "", "models");
  if (!models.is_array()) r.fail("models", "models", "expected an array");
  for (std::size_t i = 0; i < models.size(); ++i)
    c.models.push_back(parse_model(r, models[i], "models[" + std::to_string(i) + "]"));

  if (doc.contains("controllers")) {
    const json& ctrls = doc.at("controllers");
    if (!ctrls.is_array()) r.fail("controllers", "controllers", "expected an array");
    for (std::size_t i = 0; i < ctrls.size(); ++i)
      c.controllers.push_back(parse_controller(r, ctrls[i], "controllers[" + std::to_string(i) + "]"));
  }
  if (doc.contains("p_values")) c.p_values = r.exponents(doc, "", "p_values");
  else c.p_values = {LpExponent::finite(2.0)};

  if (doc.contains("horizon")) c.horizon = r.unsigned_field(doc, "", "horizon");
  if (c.horizon < 1) r.fail("horizon", "horizon", "must be >= 1");
  if (doc.contains("trials")) c.trials = r.unsigned_field(doc, "", "trials");
  if (c.trials < 1) r.fail("trials", "trials", "must be >= 1");
  if (doc.contains("seeds")) c.seeds = r.unsigned_field(doc, "", "seeds");
  if (c.seeds < 1) r.fail("seeds", "seeds", "must be >= 1");
  if (doc.contains("master_seed")) c.master_seed = r.unsigned_field(doc, "", "master_seed");
  if (doc.contains("output_dir")) c.output_dir = r.string(doc, "", "output_dir");
  if (doc.contains("mode")) c.mode = parse_mode(r, r.string(doc, "", "mode"));
  if (doc.contains("at_step") && !doc.at("at_step").is_null())
    c.at_step = r.unsigned_field(doc, "", "at_step");
  if (doc.contains("burn_in") && !doc.at("burn_in").is_null())
    c.burn_in = r.unsigned_field(doc, "", "burn_in");
  if (doc.contains("tightness")) {
    if (!doc.at("tightness").is_boolean()) r.fail("tightness", "tightness", "expected a boolean");
    c.tightness = doc.at("tightness").get<bool>();
  }
  if (doc.contains("whiteness_lags")) c.whiteness_lags = r.unsigned_field(doc, "", "whiteness_lags");
  if (c.whiteness_lags < 1) r.fail("whiteness_lags", "whiteness_lags", "must be >= 1");
  if (doc.contains("record_runtime")) {
    if (!doc.at("record_runtime").is_boolean())
      r.fail("record_runtime", "record_runtime", "expected a boolean");
    c.record_runtime = doc.at("record_runtime").get<bool>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  json models = json::array();
  for (const auto& m : c.models) models.push_back(model_json(m));
  j["models"] = models;
  json ctrls = json::array();
  for (const auto& ctrl : c.controllers) ctrls.push_back(controller_json(ctrl));
  j["controllers"] = ctrls;
  json ps = json::array();
  for (const auto& p : c.p_values) ps.push_back(exponent_json(p));
  j["p_values"] = ps;
  j["horizon"] = c.horizon;
  j["trials"] = c.trials;
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["at_step"] = c.at_step ? json(*c.at_step) : json(nullptr);
  j["burn_in"] = c.burn_in ? json(*c.burn_in) : json(nullptr);
  j["tightness"] = c.tightness;
  j["whiteness_lags"] = c.whiteness_lags;
  j["record_runtime"] = c.record_runtime;
  return j.dump(2) + "\n";
}

std::vector<ControllerPtr> instantiate_controllers(const ControllerSpec& spec,
                                                   const DisturbanceModel& model) {
  const std::size_t dim = model.dim();
  auto scalar_only = [&] {
    if (dim != 1)
      throw DimensionError(to_string(spec.kind) + " controllers support scalar models only");
  };
  switch (spec.kind) {
    case ControllerKind::zero:
      return {zero_controller(dim)};
    case ControllerKind::predictor:
      return {predictor_controller(model)};
    case ControllerKind::anticipatory:
      return {anticipatory_controller(dim)};
    case ControllerKind::constant:
      scalar_only();
      return {constant_controller(spec.value)};
    case ControllerKind::linear:
      scalar_only();
      return {linear_feedback_controller(spec.taps)};
    case ControllerKind::random: {
      std::vector<ControllerPtr> out;
      for (std::size_t i = 0; i < spec.count; ++i)
        out.push_back(random_causal_controller(derive_seed(spec.seed, i), 1 + i % spec.memory,
                                               spec.gain_cap, dim));
      return out;
    }
    case ControllerKind::learned: {
      scalar_only();
      std::vector<SimulationTrace> training;
      const auto zero = zero_controller();
      for (std::size_t t = 0; t < spec.training_traces; ++t)
        training.push_back(run_loop(model, *zero, spec.training_length, derive_seed(spec.seed, t)));
      return {learned_controller(training, spec.memory, {.polynomial_degree = spec.degree})};
    }
  }
  return {};
}

}  // namespace entrolim

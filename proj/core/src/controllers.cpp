// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "entrolim/simulator.hpp"

namespace entrolim {

void ControllerPolicy::initial_output(std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

namespace {

class ZeroController final : public ControllerPolicy {
 public:
  explicit ZeroController(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::string descriptor() const override { return "zero"; }
  void step(std::size_t, SignalView, SignalView, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }

 private:
  std::size_t dim_;
};

class ConstantController final : public ControllerPolicy {
 public:
  explicit ConstantController(double value) : value_(value) {}
  std::size_t dim() const override { return 1; }
  std::string descriptor() const override { return "constant(" + format_double(value_) + ")"; }
  void initial_output(std::span<double> out) const override { out[0] = value_; }
  void step(std::size_t, SignalView, SignalView, std::span<double> out) const override {
    out[0] = value_;
  }

 private:
  double value_;
};

class LinearFeedbackController final : public ControllerPolicy {
 public:
  explicit LinearFeedbackController(std::vector<double> taps) : taps_(std::move(taps)) {}
  std::size_t dim() const override { return 1; }
  std::string descriptor() const override {
    std::string s = "linear_feedback(";
    for (std::size_t i = 0; i < taps_.size(); ++i)
      s += (i ? "," : "") + format_double(taps_[i]);
    return s + ")";
  }
  void step(std::size_t k, SignalView errors, SignalView, std::span<double> out) const override {
    double v = 0.0;
    for (std::size_t j = 1; j <= std::min(k, taps_.size()); ++j)
      v += taps_[j - 1] * errors.scalar(k - j);
    out[0] = v;
  }

 private:
  std::vector<double> taps_;
};

class ScalarPredictor final : public ControllerPolicy {
 public:
  ScalarPredictor(DisturbanceModel model, std::size_t order)
      : model_(std::move(model)), order_(order) {}
  std::size_t dim() const override { return 1; }
  std::string descriptor() const override { return "predictor"; }
  void step(std::size_t k, SignalView errors, SignalView outputs,
            std::span<double> out) const override {
    const std::size_t r = std::min(k, order_);
    const auto taps = model_.predictors().taps(r);
    double prediction = 0.0;
    for (std::size_t j = 1; j <= r; ++j) {
      const double d = errors.scalar(k - j) - outputs.scalar(k - j);
      prediction += taps[j - 1] * d;
    }
    out[0] = -prediction;
  }

 private:
  DisturbanceModel model_;
  std::size_t order_;
};

class VectorPredictor final : public ControllerPolicy {
 public:
  explicit VectorPredictor(Eigen::MatrixXd transition) : a_(std::move(transition)) {}
  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  std::string descriptor() const override { return "predictor"; }
  void step(std::size_t k, SignalView errors, SignalView outputs,
            std::span<double> out) const override {
    const auto m = a_.rows();
    Eigen::VectorXd d(m);
    const auto e = errors.at(k - 1);
    const auto z = outputs.at(k - 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      d(i) = e[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd pred = a_ * d;
    for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = -pred(i);
  }

 private:
  Eigen::MatrixXd a_;
};

class RandomCausalController final : public ControllerPolicy {
 public:
  RandomCausalController(std::uint64_t seed, std::size_t memory, double cap, std::size_t dim)
      : seed_(seed), memory_(memory), cap_(cap), dim_(dim) {
    Rng rng(seed);
    std::uniform_real_distribution<double> mag(0.3, 1.0);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    const double scale = memory == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(memory * dim));
    weights_.resize(dim * memory * dim);
    for (auto& w : weights_) w = ((rng() & 1U) != 0 ? 1.0 : -1.0) * mag(rng) * scale;
    bias_.assign(dim, 0.0);
    if (memory > 0)
      for (auto& b : bias_) b = unit(rng) * cap;
  }
  std::size_t dim() const override { return dim_; }
  std::string descriptor() const override {
    return "random(seed=" + std::to_string(seed_) + ",memory=" + std::to_string(memory_) +
           ",cap=" + format_double(cap_) + ")";
  }
  void step(std::size_t k, SignalView errors, SignalView, std::span<double> out) const override {
    for (std::size_t i = 0; i < dim_; ++i) {
      if (memory_ == 0) {
        out[i] = 0.0;
        continue;
      }
      double v = bias_[i];
      for (std::size_t lag = 1; lag <= std::min(k, memory_); ++lag) {
        const auto e = errors.at(k - lag);
        for (std::size_t c = 0; c < dim_; ++c)
          v += weights_[(i * memory_ + (lag - 1)) * dim_ + c] * e[c];
      }
      out[i] = std::clamp(v, -cap_, cap_);
    }
  }

 private:
  std::uint64_t seed_;
  std::size_t memory_;
  double cap_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

class AnticipatoryController final : public ControllerPolicy {
 public:
  explicit AnticipatoryController(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::string descriptor() const override { return "anticipatory"; }
  void step(std::size_t k, SignalView errors, SignalView, std::span<double> out) const override {
    for (std::size_t i = 0; i < dim_; ++i) out[i] = errors.length() > k ? errors.at(k)[i] : 0.0;
  }
  void initial_output(std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }

 private:
  std::size_t dim_;
};

// Stages ---------------------------------------------------------------------

class DelayStage final : public Stage {
 public:
  explicit DelayStage(double gain) : gain_(gain) {}
  bool strictly_causal() const override { return true; }
  double output(std::span<const double> input) const override {
    return input.empty() ? 0.0 : gain_ * input.back();
  }
  std::string descriptor() const override { return "delay(" + format_double(gain_) + ")"; }

 private:
  double gain_;
};

class GainStage final : public Stage {
 public:
  explicit GainStage(double gain) : gain_(gain) {}
  bool strictly_causal() const override { return false; }
  double output(std::span<const double> input) const override { return gain_ * input.back(); }
  std::string descriptor() const override { return "gain(" + format_double(gain_) + ")"; }

 private:
  double gain_;
};

class FunctionStage final : public Stage {
 public:
  FunctionStage(bool strict, std::function<double(std::span<const double>)> fn, std::string name)
      : strict_(strict), fn_(std::move(fn)), name_(std::move(name)) {}
  bool strictly_causal() const override { return strict_; }
  double output(std::span<const double> input) const override { return fn_(input); }
  std::string descriptor() const override { return name_; }

 private:
  bool strict_;
  std::function<double(std::span<const double>)> fn_;
  std::string name_;
};

class ComposedController final : public ControllerPolicy {
 public:
  ComposedController(StagePtr inner, StagePtr outer, std::string name)
      : inner_(std::move(inner)), outer_(std::move(outer)), name_(std::move(name)) {}
  std::size_t dim() const override { return 1; }
  std::string descriptor() const override { return name_; }
  void initial_output(std::span<double> out) const override { out[0] = evaluate(0, {}); }
  void step(std::size_t k, SignalView errors, SignalView, std::span<double> out) const override {
    out[0] = evaluate(k, errors.raw());
  }

 private:
  // z_k = outer(inner(e))_k using e_0..e_{k-1} only.
  double evaluate(std::size_t k, std::span<const double> e) const {
    const std::size_t needed = outer_->strictly_causal() ? k : k + 1;
    std::vector<double> mid(needed);
    for (std::size_t j = 0; j < needed; ++j) {
      const std::size_t visible = inner_->strictly_causal() ? j : j + 1;
      mid[j] = inner_->output(e.first(visible));
    }
    return outer_->output(mid);
  }

  StagePtr inner_;
  StagePtr outer_;
  std::string name_;
};

}  // namespace

ControllerPtr zero_controller(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("controller dimension must be >= 1");
  return std::make_shared<ZeroController>(dim);
}

ControllerPtr constant_controller(double value) {
  return std::make_shared<ConstantController>(value);
}

ControllerPtr linear_feedback_controller(std::vector<double> taps) {
  return std::make_shared<LinearFeedbackController>(std::move(taps));
}

ControllerPtr predictor_controller(const DisturbanceModel& model) {
  switch (model.kind()) {
    case ModelKind::iid:
      return std::make_shared<ScalarPredictor>(model, 0);
    case ModelKind::gen_gauss_ar:
      return std::make_shared<ScalarPredictor>(model, model.ar().size());
    case ModelKind::gauss_arma:
      return std::make_shared<ScalarPredictor>(model, model.prediction_order());
    case ModelKind::vector_gauss_ar:
      return std::make_shared<VectorPredictor>(model.transition());
  }
  throw InvalidArgument("unsupported model family for the predictor controller");
}

ControllerPtr random_causal_controller(std::uint64_t seed, std::size_t memory, double gain_cap,
                                       std::size_t dim) {
  if (!(gain_cap > 0.0)) throw InvalidArgument("gain_cap must be positive");
  if (dim == 0) throw InvalidArgument("controller dimension must be >= 1");
  return std::make_shared<RandomCausalController>(seed, memory, gain_cap, dim);
}

ControllerPtr anticipatory_controller(std::size_t dim) {
  return std::make_shared<AnticipatoryController>(dim);
}

// Learned policy -------------------------------------------------------------

LearnedController::LearnedController(std::span<const SimulationTrace> training,
                                     std::size_t memory, LearnedControllerOptions options)
    : memory_(memory), options_(options) {
  if (options_.polynomial_degree < 1 || options_.polynomial_degree > 2) {
    throw InvalidArgument("learned controller polynomial_degree must be 1 or 2");
  }
  const std::size_t features = memory * static_cast<std::size_t>(options_.polynomial_degree);
  if (features == 0) return;

  const auto f = static_cast<Eigen::Index>(features);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f, f);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f);
  double yy = 0.0;
  std::size_t rows = 0;
  Eigen::VectorXd x(f);
  for (const auto& trace : training) {
    if (trace.dim() != 1) throw DimensionError("learned controller trains on scalar traces");
    const auto& d = trace.d.raw();
    for (std::size_t k = memory; k < d.size(); ++k) {
      for (std::size_t j = 1; j <= memory; ++j) {
        x(static_cast<Eigen::Index>(j - 1)) = d[k - j];
        if (options_.polynomial_degree == 2)
          x(static_cast<Eigen::Index>(memory + j - 1)) = d[k - j] * d[k - j];
      }
      const double y = -d[k];
      gram.noalias() += x * x.transpose();
      rhs += y * x;
      yy += y * y;
      ++rows;
    }
  }
  if (rows <= features) throw InvalidArgument("not enough training samples for the learned controller");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  Eigen::MatrixXd system = gram;
  if (!(max_ev > 0.0) || min_ev <= 1e-12 * max_ev) {
    used_ridge_ = true;
    system += options_.ridge_lambda * Eigen::MatrixXd::Identity(f, f);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  const Eigen::VectorXd beta = ldlt.solve(rhs);
  coefficients_.assign(beta.data(), beta.data() + beta.size());

  const double rss = std::max(0.0, yy - beta.dot(rhs));
  const double sigma2 = rss / static_cast<double>(rows - features);
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(f, f));
  standard_errors_.resize(features);
  for (std::size_t i = 0; i < features; ++i) {
    standard_errors_[i] =
        std::sqrt(std::max(0.0, sigma2 * inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
  }
}

std::string LearnedController::descriptor() const {
  return "learned(memory=" + std::to_string(memory_) +
         ",degree=" + std::to_string(options_.polynomial_degree) + ")";
}

void LearnedController::step(std::size_t k, SignalView errors, SignalView outputs,
                             std::span<double> out) const {
  double v = 0.0;
  for (std::size_t j = 1; j <= std::min(k, memory_); ++j) {
    const double d = errors.scalar(k - j) - outputs.scalar(k - j);
    v += coefficients_[j - 1] * d;
    if (options_.polynomial_degree == 2) v += coefficients_[memory_ + j - 1] * d * d;
  }
  out[0] = v;
}

std::shared_ptr<const LearnedController> learned_controller(std::span<const SimulationTrace> training,
                                                            std::size_t memory,
                                                            LearnedControllerOptions options) {
  return std::make_shared<LearnedController>(training, memory, options);
}

// Composition ---------------------------------------------------------------

StagePtr delay_stage(double gain) { return std::make_shared<DelayStage>(gain); }

StagePtr gain_stage(double gain) { return std::make_shared<GainStage>(gain); }

StagePtr function_stage(bool strictly_causal, std::function<double(std::span<const double>)> fn,
                        std::string descriptor) {
  return std::make_shared<FunctionStage>(strictly_causal, std::move(fn), std::move(descriptor));
}

ControllerPtr compose_loop(StagePtr plant, StagePtr controller, CompositionOrder order) {
  if (!plant || !controller) throw InvalidArgument("compose_loop needs two stages");
  if (!plant->strictly_causal() && !controller->strictly_causal()) {
    throw InvalidArgument(
        "compose_loop: at least one of plant and controller must be strictly causal");
  }
  if (order == CompositionOrder::KP) {
    return std::make_shared<ComposedController>(
        plant, controller, "K(P) plant=" + plant->descriptor() + " controller=" + controller->descriptor());
  }
  return std::make_shared<ComposedController>(
      controller, plant, "P(K) plant=" + plant->descriptor() + " controller=" + controller->descriptor());
}

}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "entrolim/estimators.hpp"
#include "entrolim/simulator.hpp"
#include "json.hpp"

namespace entrolim {
namespace {

double mean_square(const Signal& s, std::size_t from) {
  double acc = 0.0;
  for (std::size_t k = from; k < s.length(); ++k) acc += s.scalar(k) * s.scalar(k);
  return acc / static_cast<double>(s.length() - from);
}

double max_abs(const Signal& s, std::size_t from = 0) {
  double mx = 0.0;
  for (std::size_t k = from; k < s.length(); ++k) mx = std::max(mx, std::abs(s.scalar(k)));
  return mx;
}

void expect_loop_identity(const SimulationTrace& t) {
  for (std::size_t i = 0; i < t.e.raw().size(); ++i) ASSERT_EQ(t.e.raw()[i], t.d.raw()[i] + t.z.raw()[i]);
}

TEST(RunLoop, ZeroControllerPassesDisturbanceThrough) {
  const std::vector<DisturbanceModel> models{
      DisturbanceModel::iid(GeneralizedGaussian::laplace(1.0)), DisturbanceModel::gauss_arma({0.9}, {}, 1.0),
      DisturbanceModel::vector_gauss_ar(0.5 * Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2))};
  for (const auto& m : models) {
    const auto t = run_loop(m, *zero_controller(m.dim()), 1000, 3);
    EXPECT_EQ(t.e, t.d);
    EXPECT_EQ(t.d, m.sample_path(1000, 3));
    expect_loop_identity(t);
  }
}

TEST(RunLoop, PredictorOnAr1LeavesInnovations) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto t = run_loop(m, *predictor_controller(m), 100000, 5);
  EXPECT_NEAR(mean_square(t.e, 1), 1.0, 0.01);
  for (std::size_t k = 1; k < 50; ++k) EXPECT_NEAR(t.z.scalar(k), -0.9 * t.d.scalar(k - 1), 1e-12);
  expect_loop_identity(t);
}

TEST(RunLoop, PredictorOnGenGaussArUniform) {
  const auto m = DisturbanceModel::gen_gauss_ar({0.9}, GeneralizedGaussian::uniform(1.0));
  const auto t = run_loop(m, *predictor_controller(m), 100000, 6);
  const double mx = max_abs(t.e, 1);
  EXPECT_LE(mx, 1.0);
  EXPECT_GE(mx, 0.99);
}

TEST(RunLoop, PredictorOnIidIsZero) {
  const auto m = DisturbanceModel::iid(GeneralizedGaussian::laplace(1.0));
  const auto t = run_loop(m, *predictor_controller(m), 500, 1);
  EXPECT_EQ(max_abs(t.z), 0.0);
}

TEST(RunLoop, PredictorOnVectorAr) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.2, -0.1, 0.4;
  const auto m = DisturbanceModel::vector_gauss_ar(a, Eigen::MatrixXd::Identity(2, 2));
  const auto t = run_loop(m, *predictor_controller(m), 200, 2);
  for (std::size_t k = 1; k < 200; ++k) {
    const Eigen::Vector2d prev(t.d.at(k - 1)[0], t.d.at(k - 1)[1]);
    const Eigen::Vector2d z = -a * prev;
    EXPECT_NEAR(t.z.at(k)[0], z(0), 1e-12);
    EXPECT_NEAR(t.z.at(k)[1], z(1), 1e-12);
  }
}

TEST(RunLoop, ConstantControllerShiftsUniform) {
  const auto m = DisturbanceModel::iid(GeneralizedGaussian::uniform(1.0));
  const auto t = run_loop(m, *constant_controller(0.5), 100000, 7);
  double lo = 1e9, hi = -1e9;
  for (double e : t.e.raw()) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  EXPECT_GE(lo, -0.5);
  EXPECT_LE(hi, 1.5);
  EXPECT_NEAR(max_abs(t.e), 1.5, 0.01);
}

TEST(RunLoop, DimensionMismatchThrows) {
  const auto m = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  EXPECT_THROW(run_loop(m, *zero_controller(2), 10, 0), DimensionError);
}

TEST(RunLoop, IsDeterministic) {
  const auto m = DisturbanceModel::gauss_arma({0.5, 0.2}, {0.3}, 1.0);
  const auto c = random_causal_controller(11, 3, 5.0);
  const auto a = run_loop(m, *c, 2000, 9);
  const auto b = run_loop(m, *random_causal_controller(11, 3, 5.0), 2000, 9);
  EXPECT_EQ(a.e, b.e);
  EXPECT_EQ(a.z, b.z);
}

TEST(RandomController, MemoryZeroIsZeroMap) {
  const auto m = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  const auto t = run_loop(m, *random_causal_controller(3, 0, 5.0), 300, 1);
  EXPECT_EQ(max_abs(t.z), 0.0);
}

TEST(RandomController, RespectsGainCapAndSeeds) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto t = run_loop(m, *random_causal_controller(4, 4, 0.5), 3000, 1);
  EXPECT_LE(max_abs(t.z), 0.5);
  const auto u = run_loop(m, *random_causal_controller(5, 4, 0.5), 3000, 1);
  EXPECT_NE(t.z, u.z);
}

TEST(RandomController, NeverBeatsTheVarianceFloor) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = run_loop(m, *random_causal_controller(seed, 1 + seed % 4, 5.0), 20000, seed);
    const auto est = lp_norm_estimate(std::span(t.e.raw()).subspan(1000), LpExponent::finite(2.0), 20);
    EXPECT_GE(est.value, 1.0 - 3 * est.std_error) << seed;
  }
}

std::vector<SimulationTrace> training_traces(const DisturbanceModel& m, std::size_t count, std::size_t length) {
  std::vector<SimulationTrace> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(run_loop(m, *zero_controller(), length, 100 + i));
  return out;
}

TEST(LearnedController, RecoversAr1Tap) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto traces = training_traces(m, 1, 100000);
  const auto c = learned_controller(traces, 1);
  ASSERT_EQ(c->coefficients().size(), 1U);
  EXPECT_NEAR(c->coefficients()[0], -0.9, 0.01);
  EXPECT_FALSE(c->used_ridge());

  const auto t = run_loop(m, *c, 100000, 77);
  const auto est = lp_norm_estimate(std::span(t.e.raw()).subspan(100), LpExponent::finite(2.0), 20);
  const double var = est.value * est.value;
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_GE(est.value, 1.0 - 3 * est.std_error);
}

TEST(LearnedController, IidTapsVanish) {
  const auto m = DisturbanceModel::iid(GeneralizedGaussian::laplace(1.0));
  const auto c = learned_controller(training_traces(m, 2, 20000), 3);
  ASSERT_EQ(c->coefficients().size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(c->coefficients()[i]), 3 * c->standard_errors()[i]);
}

TEST(LearnedController, RidgeFallbackOnSingularDesign) {
  Signal zeros(1, 500);
  SimulationTrace t = run_loop(zeros, *zero_controller());
  const std::vector<SimulationTrace> traces{t};
  const auto c = learned_controller(traces, 2);
  EXPECT_TRUE(c->used_ridge());
  for (double w : c->coefficients()) EXPECT_TRUE(std::isfinite(w));
}

TEST(ComposeLoop, DelayThenIdentity) {
  const auto composed = compose_loop(delay_stage(), gain_stage(1.0), CompositionOrder::KP);
  const auto m = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  const auto t = run_loop(m, *composed, 200, 4);
  EXPECT_EQ(t.z.scalar(0), 0.0);
  for (std::size_t k = 1; k < 200; ++k) EXPECT_EQ(t.z.scalar(k), t.e.scalar(k - 1));
}

TEST(ComposeLoop, GainThenDelayMatchesDirectPolicy) {
  const double a = 0.7;
  const auto composed = compose_loop(delay_stage(a), gain_stage(-1.0), CompositionOrder::PK);
  const auto m = DisturbanceModel::gauss_arma({a}, {}, 1.0);
  const auto t1 = run_loop(m, *composed, 500, 8);
  const auto t2 = run_loop(m, *linear_feedback_controller({-a}), 500, 8);
  for (std::size_t k = 0; k < 500; ++k) EXPECT_NEAR(t1.z.scalar(k), t2.z.scalar(k), 1e-14);
}

TEST(ComposeLoop, RejectsTwoCausalStages) {
  EXPECT_THROW(compose_loop(gain_stage(1.0), gain_stage(2.0), CompositionOrder::KP), InvalidArgument);
}

TEST(CausalityAudit, CausalPoliciesPass) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  EXPECT_TRUE(causality_audit(*predictor_controller(m), 64, 20, 1).passed);
  EXPECT_TRUE(causality_audit(*random_causal_controller(8, 3, 5.0), 64, 100, 2).passed);
  EXPECT_TRUE(causality_audit(*compose_loop(delay_stage(), gain_stage(1.0), CompositionOrder::KP), 32, 20, 3).passed);
  const auto learned = learned_controller(training_traces(m, 1, 5000), 2);
  EXPECT_TRUE(causality_audit(*learned, 64, 20, 4).passed);
}

TEST(CausalityAudit, AnticipatoryFailsAtEveryStep) {
  const auto c = anticipatory_controller();
  const auto report = causality_audit(*c, 64, 10, 5);
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.violating_steps.size(), 10U);
  Rng rng(1);
  std::normal_distribution<double> normal;
  Signal errors(1, 40);
  for (auto& x : errors.raw()) x = normal(rng);
  for (std::size_t k = 1; k < 40; ++k) {
    const auto bad = causality_probe(*c, errors, k, k);
    ASSERT_TRUE(bad.has_value()) << k;
    EXPECT_EQ(*bad, k);
  }
}

TEST(CausalityAudit, ClosedLoopPerturbation) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  for (std::size_t k : {0, 1, 5, 63}) {
    EXPECT_TRUE(closed_loop_perturbation_check(m, *predictor_controller(m), 64, k, k));
    EXPECT_TRUE(closed_loop_perturbation_check(m, *random_causal_controller(k, 2, 5.0), 64, k, k));
  }
  EXPECT_THROW(closed_loop_perturbation_check(m, *zero_controller(), 10, 10, 0), InvalidArgument);
}

// Predictor-controlled AR(1): the error carries no information about the
// past; without control both informations are positive and equal.
TEST(InnovationsIdentity, MutualInformationAroundTheLoop) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const std::size_t n = 100000;
  auto lagged = [](const Signal& a, const Signal& b) {
    Signal x(1, a.length() - 1), y(1, a.length() - 1);
    for (std::size_t k = 1; k < a.length(); ++k) {
      x.at(k - 1)[0] = a.scalar(k);
      y.at(k - 1)[0] = b.scalar(k - 1);
    }
    return std::pair{x, y};
  };
  const auto pt = run_loop(m, *predictor_controller(m), n, 21);
  const auto [pe, pd] = lagged(pt.e, pt.d);
  const auto [pe2, pe1] = lagged(pt.e, pt.e);
  EXPECT_LT(mutual_information_estimate(pe, pd, 4, 1).value_bits, 0.02);
  EXPECT_LT(mutual_information_estimate(pe2, pe1, 4, 2).value_bits, 0.02);

  const auto zt = run_loop(m, *zero_controller(), n, 22);
  const auto [ze, zd] = lagged(zt.e, zt.d);
  const auto [ze2, ze1] = lagged(zt.e, zt.e);
  const auto a = mutual_information_estimate(ze, zd, 4, 3);
  const auto b = mutual_information_estimate(ze2, ze1, 4, 4);
  EXPECT_GT(a.value_bits, 0.5);
  EXPECT_NEAR(a.value_bits, b.value_bits, 3 * std::hypot(a.std_error_bits, b.std_error_bits) + 1e-9);
  // I = -1/2 log2(1 - 0.81) for a Gaussian pair with correlation 0.9.
  EXPECT_NEAR(a.value_bits, -0.5 * std::log2(0.19), 0.05);
}

TEST(TraceIo, CsvRoundTripAndSidecar) {
  const auto dir = std::filesystem::temp_directory_path() / "entrolim_trace_io";
  std::filesystem::create_directories(dir);
  const auto m = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  const auto t = run_loop(m, *random_causal_controller(1, 2, 3.0), 300, 42);
  write_trace_csv(t, (dir / "t.csv").string());
  write_trace_sidecar(t, (dir / "t.json").string());
  const auto back = read_trace_csv((dir / "t.csv").string());
  EXPECT_EQ(back.d, t.d);
  EXPECT_EQ(back.z, t.z);
  EXPECT_EQ(back.e, t.e);
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,d,z,e");
  std::ifstream js(dir / "t.json");
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["model"], m.descriptor());
  EXPECT_EQ(j["length"], 300);

  const auto mv = DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const auto tv = run_loop(mv, *zero_controller(2), 20, 1);
  write_trace_csv(tv, (dir / "v.csv").string());
  std::ifstream vin(dir / "v.csv");
  std::getline(vin, header);
  EXPECT_EQ(header, "k,d_0,d_1,z_0,z_1,e_0,e_1");
  EXPECT_EQ(read_trace_csv((dir / "v.csv").string()).e, tv.e);
  std::filesystem::remove_all(dir);
}

TEST(TraceIo, UnwritablePathThrowsIoError) {
  const auto t = run_loop(DisturbanceModel::gauss_arma({0.5}, {}, 1.0), *zero_controller(), 5, 1);
  EXPECT_THROW(write_trace_csv(t, "/nonexistent_dir/x/t.csv"), IoError);
  EXPECT_THROW(read_trace_csv("/nonexistent_dir/x/t.csv"), IoError);
}

}  // namespace
}  // namespace entrolim

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "entrolim/verify.hpp"
#include "json.hpp"

namespace entrolim {
namespace {

const auto kP2 = LpExponent::finite(2.0);
const auto kInf = LpExponent::infinity();

VerifyOptions quick() {
  VerifyOptions o;
  o.tightness = false;
  o.record_runtime = false;
  return o;
}

TEST(VerifyBound, PredictorOnAr1IsTight) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto r = verify_bound(m, *predictor_controller(m), kP2, Asymptotic{}, 100000, 1, 1);
  EXPECT_GE(r.gap_ratio, 0.99);
  EXPECT_LE(r.gap_ratio, 1.01);
  EXPECT_FALSE(r.violation);
  EXPECT_NEAR(r.bound.bound_value, 1.0, 1e-12);
  ASSERT_TRUE(r.tightness.has_value());
  EXPECT_TRUE(r.tightness->whiteness_pass());
  EXPECT_TRUE(r.tightness->ggfit_pass());
  EXPECT_LT(r.tightness->mi_error_lag1.value_bits, 0.02);
  EXPECT_LT(r.tightness->mi_error_past_disturbance.value_bits, 0.02);
  EXPECT_FALSE(r.whiteness_caveat);
  EXPECT_EQ(r.seeds.size(), 1U);
}

TEST(VerifyBound, ZeroControllerOnAr1) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto r = verify_bound(m, *zero_controller(), kP2, Asymptotic{}, 100000, 4, 2, quick());
  EXPECT_NEAR(r.gap_ratio, std::sqrt(1 / 0.19), 0.02 * std::sqrt(1 / 0.19));
  EXPECT_FALSE(r.violation);
  EXPECT_EQ(r.seeds.size(), 4U);
}

TEST(VerifyBound, PredictorOnUniformArAtInfinity) {
  const auto m = DisturbanceModel::gen_gauss_ar({0.9}, GeneralizedGaussian::uniform(1.0));
  const auto r = verify_bound(m, *predictor_controller(m), kInf, Asymptotic{}, 100000, 1, 3, quick());
  EXPECT_GE(r.gap_ratio, 0.99);
  EXPECT_LE(r.gap_ratio, 1.0);
  EXPECT_FALSE(r.violation);
  EXPECT_TRUE(r.downward_biased);
}

TEST(VerifyBound, AtStepUsesAcrossTrialSamples) {
  const auto m = DisturbanceModel::gauss_arma({0.5}, {}, 1.0);
  const auto r0 = verify_bound(m, *zero_controller(), kP2, AtStep{0}, 0, 4000, 4, quick());
  EXPECT_NEAR(r0.bound.bound_value, std::sqrt(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(r0.gap_ratio, 1.0, 4 * r0.std_error / r0.bound.bound_value);
  const auto r5 = verify_bound(m, *predictor_controller(m), kP2, AtStep{5}, 0, 4000, 5, quick());
  EXPECT_NEAR(r5.gap_ratio, 1.0, 4 * r5.std_error / r5.bound.bound_value);
  EXPECT_FALSE(r5.violation);
  EXPECT_EQ(r5.seeds.size(), 4000U);
  EXPECT_THROW(verify_bound(m, *zero_controller(), kP2, AtStep{3}, 0, 1, 6, quick()), InvalidArgument);
}

TEST(VerifyBound, DefaultBurnIn) {
  EXPECT_EQ(default_burn_in(DisturbanceModel::gauss_arma({0.5}, {}, 1.0)), 1000U);
  EXPECT_GE(default_burn_in(DisturbanceModel::gauss_arma({0.999}, {}, 1.0)), 1000U);
}

TEST(VerifyMimo, Examples) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const auto white = DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 2), id);
  const auto r = verify_mimo_bound(white, *zero_controller(2), 100000, 2, 1, quick());
  EXPECT_GE(r.gap_ratio, 0.98);
  EXPECT_LE(r.gap_ratio, 1.02);
  EXPECT_FALSE(r.violation);
  ASSERT_TRUE(r.mimo_product.has_value());
  EXPECT_GE(r.mimo_product->gap_ratio, r.gap_ratio * (1 - 1e-3));

  const auto ar = DisturbanceModel::vector_gauss_ar(0.5 * id, id);
  const auto p = verify_mimo_bound(ar, *predictor_controller(ar), 100000, 2, 2, quick());
  EXPECT_NEAR(p.gap_ratio, 1.0, 0.02);
  const auto z = verify_mimo_bound(ar, *zero_controller(2), 100000, 2, 3, quick());
  EXPECT_NEAR(z.gap_ratio, 16.0 / 9.0, 0.04 * 16.0 / 9.0);
  EXPECT_FALSE(z.violation);
}

TEST(Tightness, ZeroControlledAr1FailsWhiteness) {
  const auto m = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto t = run_loop(m, *zero_controller(), 20000, 7);
  const auto r = tightness_report(t, kP2, {10, 1000, 1});
  EXPECT_FALSE(r.whiteness_pass());
  EXPECT_NEAR(r.whiteness.autocorrelations[0], 0.9, 0.02);
  EXPECT_TRUE(r.mi_identity_holds());
}

TEST(Tightness, IidZeroControlledIsCertified) {
  const auto m = DisturbanceModel::iid(GeneralizedGaussian::laplace(1.0));
  const auto t = run_loop(m, *zero_controller(), 20000, 8);
  const auto r = tightness_report(t, LpExponent::finite(1.0));
  EXPECT_TRUE(r.whiteness_pass());
  EXPECT_TRUE(r.ggfit_pass());
  EXPECT_TRUE(r.mi_identity_holds());
  EXPECT_THROW(tightness_report(run_loop(m, *zero_controller(), 5000, 9), kP2), InvalidArgument);
}

ExperimentConfig equality_family() {
  ExperimentConfig c;
  for (auto p : {LpExponent::finite(1.0), LpExponent::finite(1.5), kP2, LpExponent::finite(4.0), kInf})
    c.models.push_back({"gg_" + p.to_string(), DisturbanceModel::iid(GeneralizedGaussian(p, 1.0)), {p}});
  c.controllers = {ControllerSpec{}};
  c.p_values = {LpExponent::finite(1.0), LpExponent::finite(1.5), kP2, LpExponent::finite(4.0), kInf};
  c.horizon = 100000;
  c.tightness = false;
  return c;
}

TEST(Sweep, EqualityFamilyIsTight) {
  const auto result = sweep(equality_family(), {.threads = 2});
  ASSERT_EQ(result.cells.size(), 5U);
  for (const auto& cell : result.cells) {
    ASSERT_TRUE(cell.report.has_value()) << cell.error;
    EXPECT_GE(cell.report->gap_ratio, 0.98) << cell.model;
    EXPECT_LE(cell.report->gap_ratio, 1.02) << cell.model;
  }
  EXPECT_EQ(result.summary.violations, 0U);
  EXPECT_LE(std::abs(std::log(result.summary.worst_gap_ratio)), std::log(1.02));
}

TEST(Sweep, EmptyControllerList) {
  auto c = equality_family();
  c.controllers.clear();
  const auto r = sweep(c);
  EXPECT_TRUE(r.cells.empty());
  EXPECT_EQ(r.summary.cells, 0U);
  EXPECT_EQ(r.summary.violations, 0U);
  const auto j = nlohmann::json::parse(sweep_summary_json(r.summary));
  EXPECT_EQ(j["cells"], 0);
}

TEST(Sweep, RandomControllersNeverViolate) {
  ExperimentConfig c;
  c.models.push_back({"ar1", DisturbanceModel::gauss_arma({0.9}, {}, 1.0), {}});
  c.models.push_back({"laplace", DisturbanceModel::iid(GeneralizedGaussian::laplace(1.0)), {}});
  ControllerSpec random;
  random.kind = ControllerKind::random;
  random.count = 10;
  random.memory = 3;
  random.seed = 5;
  c.controllers = {random};
  c.p_values = {LpExponent::finite(1.0), kP2, kInf};
  c.horizon = 5000;
  c.tightness = false;
  const auto r = sweep(c, {.threads = 2});
  EXPECT_EQ(r.cells.size(), 60U);
  EXPECT_EQ(r.summary.violations, 0U);
  EXPECT_EQ(r.summary.failed_cells, 0U);
  EXPECT_GE(r.summary.min_gap_ratio, 0.97);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  ExperimentConfig c;
  c.models.push_back({"arma", DisturbanceModel::gauss_arma({0.6, -0.2}, {0.3}, 1.0), {}});
  ControllerSpec random;
  random.kind = ControllerKind::random;
  random.count = 3;
  c.controllers = {ControllerSpec{}, random};
  c.p_values = {kP2, kInf};
  c.seeds = 2;
  c.horizon = 3000;
  c.tightness = false;
  const auto a = sweep(c, {.threads = 1});
  const auto b = sweep(c, {.threads = 2});
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  EXPECT_EQ(sweep_summary_json(a.summary, false), sweep_summary_json(b.summary, false));
  ASSERT_EQ(a.cells.size(), 16U);
  for (std::size_t i = 1; i < a.cells.size(); ++i) {
    const auto& x = a.cells[i - 1];
    const auto& y = a.cells[i];
    EXPECT_LE(std::tie(x.model_index, x.controller_index, x.p_index, x.seed_index),
              std::tie(y.model_index, y.controller_index, y.p_index, y.seed_index));
  }
}

TEST(Sweep, AnticipatoryControllerIsRejected) {
  ExperimentConfig c;
  c.models.push_back({"ar1", DisturbanceModel::gauss_arma({0.5}, {}, 1.0), {}});
  ControllerSpec bad;
  bad.kind = ControllerKind::anticipatory;
  c.controllers = {ControllerSpec{}, bad};
  c.p_values = {kP2};
  c.horizon = 2000;
  c.tightness = false;
  const auto r = sweep(c);
  ASSERT_EQ(r.causality_failures.size(), 1U);
  EXPECT_FALSE(r.causality_failures[0].passed);
  ASSERT_EQ(r.cells.size(), 2U);
  EXPECT_TRUE(r.cells[0].report.has_value());
  EXPECT_FALSE(r.cells[1].report.has_value());
  EXPECT_EQ(r.cells[1].error, "causality audit failed");
}

TEST(Sweep, CsvSchema) {
  ExperimentConfig c;
  c.models.push_back({"ar1", DisturbanceModel::gauss_arma({0.5}, {}, 1.0), {}});
  c.controllers = {ControllerSpec{}};
  c.p_values = {kP2};
  c.horizon = 2000;
  c.tightness = false;
  const auto csv = sweep_csv(sweep(c));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "cell_id,model,controller,p,k_or_asymptotic,h_bits,bound,empirical,std_error,gap_ratio,violation,"
            "whiteness_pass,ggfit_pass,mi_lag1_bits,seed,runtime_ms");
}

TEST(Sweep, VectorModelsProduceDeterminantRows) {
  ExperimentConfig c;
  c.models.push_back({"vec", DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 2),
                                                               Eigen::MatrixXd::Identity(2, 2)),
                      {}});
  c.controllers = {ControllerSpec{}};
  c.p_values = {LpExponent::finite(1.0), kP2};
  c.horizon = 20000;
  c.tightness = false;
  const auto r = sweep(c);
  ASSERT_EQ(r.cells.size(), 1U);
  ASSERT_TRUE(r.cells[0].report.has_value()) << r.cells[0].error;
  EXPECT_EQ(r.cells[0].p, kP2);
  EXPECT_NEAR(r.cells[0].report->gap_ratio, 1.0, 0.05);
}

}  // namespace
}  // namespace entrolim

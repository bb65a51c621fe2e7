// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "entrolim/config.hpp"
#include "json.hpp"

namespace entrolim {
namespace {

const std::string kData = ENTROLIM_TEST_DATA_DIR;

ConfigError parse_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for " << text;
  return ConfigError("", 0, "");
}

TEST(Config, ParsesModelsAndControllers) {
  const auto c = load_config(kData + "/simulate_grid.json");
  ASSERT_EQ(c.models.size(), 3U);
  EXPECT_EQ(c.models[0].model.kind(), ModelKind::gauss_arma);
  EXPECT_EQ(c.models[1].model.kind(), ModelKind::iid);
  EXPECT_EQ(c.models[2].model.kind(), ModelKind::gen_gauss_ar);
  ASSERT_EQ(c.controllers.size(), 2U);
  EXPECT_EQ(c.controllers[1].kind, ControllerKind::predictor);
  EXPECT_EQ(c.mode, RunMode::simulate);
  EXPECT_EQ(c.horizon, 500U);
  EXPECT_EQ(c.seeds, 2U);
  EXPECT_EQ(c.master_seed, 11U);
  ASSERT_EQ(c.p_values.size(), 1U);
  EXPECT_EQ(c.p_values[0], LpExponent::finite(2.0));
}

TEST(Config, ParsesExponentsAndVectorModels) {
  const auto c = load_config(kData + "/bound_examples.json");
  EXPECT_EQ(c.models[1].p_values, std::vector{LpExponent::infinity()});
  EXPECT_EQ(c.models[2].model.dim(), 2U);
  EXPECT_EQ(c.models[0].name, "ar1_0.5");
}

TEST(Config, RoundTripIsStable) {
  for (const char* name : {"simulate_grid.json", "bound_examples.json", "equality_family.json", "random_sweep.json",
                           "anticipatory.json"}) {
    const auto c = load_config(kData + "/" + name);
    const std::string once = serialize_config(c);
    const auto again = parse_config(once);
    EXPECT_EQ(serialize_config(again), once) << name;
    EXPECT_EQ(again.controllers, c.controllers) << name;
    ASSERT_EQ(again.models.size(), c.models.size());
    for (std::size_t i = 0; i < c.models.size(); ++i) {
      EXPECT_EQ(again.models[i].model.descriptor(), c.models[i].model.descriptor());
      EXPECT_EQ(again.models[i].p_values, c.models[i].p_values);
    }
  }
}

TEST(Config, RoundTripIgnoresFieldOrder) {
  const std::string a = R"({"horizon": 50, "models": [{"ar": [0.3], "kind": "gauss_arma"}], "mode": "verify"})";
  const std::string b = R"({"mode": "verify", "models": [{"kind": "gauss_arma", "ar": [0.3]}], "horizon": 50})";
  EXPECT_EQ(nlohmann::json::parse(serialize_config(parse_config(a))),
            nlohmann::json::parse(serialize_config(parse_config(b))));
}

TEST(Config, UnknownFieldNamesFieldAndLine) {
  const auto e = parse_error("{\n  \"models\": [\n    {\"kind\": \"iid\", \"innovaton\": {}}\n  ]\n}");
  EXPECT_EQ(e.field(), "models[0].innovaton");
  EXPECT_EQ(e.line(), 3U);
  EXPECT_NE(std::string(e.what()).find("innovaton"), std::string::npos);
}

TEST(Config, MalformedJsonReportsLine) {
  const auto e = parse_error("{\n  \"models\": [\n  ,\n]}");
  EXPECT_EQ(e.line(), 3U);
}

TEST(Config, SemanticErrors) {
  EXPECT_EQ(parse_error(R"({"models": [], "horizon": 0})").field(), "horizon");
  EXPECT_EQ(parse_error(R"({"models": [], "p_values": [0.5]})").field(), "p_values[0]");
  EXPECT_EQ(parse_error(R"({"models": [{"kind": "gauss_arma", "ar": [1.1]}]})").field(), "models[0]");
  EXPECT_EQ(parse_error(R"({"models": [{"kind": "arima"}]})").field(), "models[0].kind");
  EXPECT_EQ(parse_error(R"({"models": [], "controllers": [{"kind": "pid"}]})").field(), "controllers[0].kind");
  EXPECT_EQ(parse_error(R"({"models": [], "mode": "fast"})").field(), "mode");
  EXPECT_EQ(parse_error(R"({"controllers": []})").field(), "models");
  EXPECT_EQ(parse_error(R"({"models": [{"kind": "iid", "innovation": {"family": "cauchy"}}]})").field(),
            "models[0].innovation.family");
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config(kData + "/does_not_exist.json"), IoError);
}

TEST(Config, InstantiatesControllers) {
  const auto model = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  ControllerSpec random;
  random.kind = ControllerKind::random;
  random.count = 5;
  random.memory = 2;
  const auto rs = instantiate_controllers(random, model);
  ASSERT_EQ(rs.size(), 5U);
  EXPECT_NE(rs[0]->descriptor(), rs[1]->descriptor());
  ControllerSpec learned;
  learned.kind = ControllerKind::learned;
  learned.training_traces = 1;
  learned.training_length = 20000;
  const auto ls = instantiate_controllers(learned, model);
  ASSERT_EQ(ls.size(), 1U);
  ControllerSpec constant;
  constant.kind = ControllerKind::constant;
  const auto vec = DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(instantiate_controllers(constant, vec), DimensionError);
  EXPECT_EQ(instantiate_controllers(ControllerSpec{}, vec)[0]->dim(), 2U);
}

}  // namespace
}  // namespace entrolim

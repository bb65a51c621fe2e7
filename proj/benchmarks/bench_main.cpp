// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "entrolim/estimators.hpp"
#include "entrolim/linear_prediction.hpp"
#include "entrolim/simulator.hpp"
#include "entrolim/spectral.hpp"

namespace {

using namespace entrolim;

void BM_RunLoopPredictor(benchmark::State& state) {
  const auto model = DisturbanceModel::gauss_arma({0.6, -0.3}, {0.4}, 1.0);
  const auto controller = predictor_controller(model);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_loop(model, *controller, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunLoopPredictor)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RunLoopRandom(benchmark::State& state) {
  const auto model = DisturbanceModel::gauss_arma({0.9}, {}, 1.0);
  const auto controller = random_causal_controller(7, 4, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_loop(model, *controller, 100000, 1));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_RunLoopRandom)->Unit(benchmark::kMillisecond);

void BM_EntropyKnn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const GaussianVector g(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
  const Signal samples = g.sample(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_estimate_knn(samples));
}
BENCHMARK(BM_EntropyKnn)->Args({10000, 1})->Args({10000, 2})->Args({100000, 2})->Unit(benchmark::kMillisecond);

void BM_EntropySpacing(benchmark::State& state) {
  const auto xs = GeneralizedGaussian::gaussian(1.0).sample(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_estimate_1d(xs));
}
BENCHMARK(BM_EntropySpacing)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SzegoIntegral(benchmark::State& state) {
  const auto model = DisturbanceModel::gauss_arma({0.95, -0.2}, {0.5}, 1.0);
  const auto spectrum = model.power_spectrum();
  for (auto _ : state) benchmark::DoNotOptimize(szego_entropy_integral_bits(spectrum));
}
BENCHMARK(BM_SzegoIntegral);

void BM_LevinsonDurbin(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  const auto r = arma_autocovariance(std::vector{0.7, -0.2}, std::vector{0.4}, 1.0, order);
  for (auto _ : state) benchmark::DoNotOptimize(levinson_durbin(r, order));
}
BENCHMARK(BM_LevinsonDurbin)->Arg(64)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();

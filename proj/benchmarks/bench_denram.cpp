// Copyright 2026 The denram-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "denram/data.hpp"
#include "denram/dendrite.hpp"
#include "denram/learn.hpp"
#include "denram/network.hpp"

namespace {

using namespace denram;

dendrite::SpikeRaster random_raster(std::size_t n_ch, std::size_t n_steps, double p, Rng& rng) {
  std::bernoulli_distribution spike(p);
  dendrite::SpikeRaster r(n_ch, n_steps, 5e-3);
  for (std::size_t c = 0; c < n_ch; ++c) {
    for (std::size_t t = 0; t < n_steps; ++t) {
      if (spike(rng)) r.add(c, t);
    }
  }
  return r;
}

network::DenramModel random_model(std::size_t n_in, std::size_t n_d, std::size_t n_out, Rng& rng) {
  network::DenramModel m;
  m.bank = dendrite::DelayBank::sample(device::DelayDistribution::from_mean(0.2, 0.5), n_in, n_d, 5e-3, rng);
  m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_in * n_d), static_cast<Eigen::Index>(n_out));
  m.alpha_out = std::exp(-5e-3 / 20e-3);
  learn::init_weights(m, rng);
  return m;
}

void BM_ExpandWithDelays(benchmark::State& state) {
  Rng rng(1);
  const auto n_ch = static_cast<std::size_t>(state.range(0));
  const auto m = random_model(n_ch, 16, 20, rng);
  const auto x = random_raster(n_ch, 150, 0.02, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dendrite::expand_with_delays(x, m.bank));
}
BENCHMARK(BM_ExpandWithDelays)->Arg(64)->Arg(256)->Arg(700);

void BM_DenseCurrent(benchmark::State& state) {
  Rng rng(2);
  const auto n_ch = static_cast<std::size_t>(state.range(0));
  const auto m = random_model(n_ch, 16, 20, rng);
  const auto expanded = dendrite::expand_with_delays(random_raster(n_ch, 150, 0.02, rng), m.bank);
  for (auto _ : state) benchmark::DoNotOptimize(dendrite::dendritic_current(expanded, m.weights));
}
BENCHMARK(BM_DenseCurrent)->Arg(64)->Arg(256)->Arg(700);

void BM_EventCurrent(benchmark::State& state) {
  Rng rng(2);
  const auto n_ch = static_cast<std::size_t>(state.range(0));
  const auto m = random_model(n_ch, 16, 20, rng);
  const auto x = random_raster(n_ch, 150, 0.02, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dendrite::dendritic_current_events(x, m.bank, m.weights));
}
BENCHMARK(BM_EventCurrent)->Arg(64)->Arg(256)->Arg(700);

void BM_DenramLossAndGrads(benchmark::State& state) {
  Rng rng(3);
  const auto m = random_model(32, 8, 5, rng);
  std::vector<data::LabeledRaster> batch;
  for (int i = 0; i < 32; ++i) batch.push_back({random_raster(32, 150, 0.02, rng), i % 5});
  for (auto _ : state) benchmark::DoNotOptimize(learn::loss_and_grads(m, batch, nullptr, rng));
}
BENCHMARK(BM_DenramLossAndGrads);

void BM_SrnnLossAndGrads(benchmark::State& state) {
  Rng rng(4);
  network::SrnnModel m;
  m.w_in = Eigen::MatrixXd::Zero(32, 32);
  m.w_rec = Eigen::MatrixXd::Zero(32, 32);
  m.w_out = Eigen::MatrixXd::Zero(32, 5);
  m.lif_hidden = network::LifParams::from_time_constant(20e-3, 5e-3);
  learn::init_weights(m, rng);
  std::vector<data::LabeledRaster> batch;
  for (int i = 0; i < 32; ++i) batch.push_back({random_raster(32, 150, 0.02, rng), i % 5});
  for (auto _ : state) benchmark::DoNotOptimize(learn::loss_and_grads(m, batch, nullptr, rng));
}
BENCHMARK(BM_SrnnLossAndGrads);

}  // namespace

BENCHMARK_MAIN();

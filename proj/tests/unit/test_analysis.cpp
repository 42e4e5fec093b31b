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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "denram/analysis.hpp"
#include "denram/error.hpp"

namespace denram::analysis {
namespace {

using dendrite::DelayBank;
using dendrite::SpikeRaster;
using network::DenramModel;
using network::SrnnModel;

DenramModel shaped_denram(std::size_t n_in, std::size_t n_d, std::size_t n_out) {
  DenramModel m;
  m.bank = DelayBank::from_shifts(Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n_in), static_cast<Eigen::Index>(n_d)), 1e-3);
  m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_in * n_d), static_cast<Eigen::Index>(n_out));
  return m;
}

SrnnModel shaped_srnn(Eigen::Index n_in, Eigen::Index n_h, Eigen::Index n_out) {
  SrnnModel m;
  m.w_in = Eigen::MatrixXd::Zero(n_in, n_h);
  m.w_rec = Eigen::MatrixXd::Zero(n_h, n_h);
  m.w_out = Eigen::MatrixXd::Zero(n_h, n_out);
  return m;
}

TEST(Footprint, GoldenNumbers) {
  const auto srnn = count_footprint(shaped_srnn(2, 32, 2), DeviceConvention::TwoPerWeightPlusDelay);
  EXPECT_EQ(srnn.trainable_parameters, 1152u);
  EXPECT_EQ(srnn.rram_devices, 2304u);
  const auto ecg = count_footprint(shaped_denram(2, 8, 1), DeviceConvention::FourPerSynapse);
  EXPECT_EQ(ecg.trainable_parameters, 16u);
  EXPECT_EQ(ecg.rram_devices, 64u);
  const auto kws = count_footprint(shaped_denram(700, 16, 20), DeviceConvention::TwoPerWeightPlusDelay);
  EXPECT_EQ(kws.trainable_parameters, 224000u);
}

TEST(Footprint, FormulasForAllSmallShapes) {
  for (std::size_t n_in = 1; n_in <= 5; ++n_in) {
    for (std::size_t n_d = 1; n_d <= 4; ++n_d) {
      for (std::size_t n_out = 1; n_out <= 3; ++n_out) {
        auto m = shaped_denram(n_in, n_d, n_out);
        const std::uint64_t p = n_in * n_d * n_out;
        auto two = count_footprint(m, DeviceConvention::TwoPerWeightPlusDelay);
        EXPECT_EQ(two.rram_devices, 2 * p + p / n_out);
        EXPECT_EQ(count_footprint(m, DeviceConvention::FourPerSynapse).rram_devices, 4 * p);
        m.shared_bank = false;
        EXPECT_EQ(count_footprint(m, DeviceConvention::TwoPerWeightPlusDelay).rram_devices, 3 * p);
        EXPECT_GE(two.rram_devices, two.trainable_parameters);
      }
    }
  }
}

TEST(Power, OneEventPerThirtyMilliseconds) {
  const EnergyTable table;
  const auto p = estimate_power({1.0 / 30e-3, 0.0, 0.0}, table);
  EXPECT_NEAR(p.watts, 1.95e-9, 1.95e-9 * 1e-9);
  EXPECT_NEAR(p.threshold_block / p.watts, 0.667, 1e-12);
  EXPECT_NEAR(p.threshold_block + p.rc_and_weight + p.mux, p.watts, 1e-24);
  EXPECT_FALSE(p.calibration_assumed);
  EXPECT_EQ(estimate_power({}, table).watts, 0.0);
}

TEST(Power, LinearInRatesAndEnergies) {
  EnergyTable t;
  const EventRates r{12.0, 3000.0, 450.0};
  const auto base = estimate_power(r, t);
  const auto doubled = estimate_power({24.0, 6000.0, 900.0}, t);
  EXPECT_NEAR(doubled.watts, 2 * base.watts, 1e-22);
  EXPECT_NEAR(base.watts, 12.0 * t.e_dendritic_event + 3000.0 * t.e_neuron_update + 450.0 * t.e_synop, 1e-22);
  t.e_synop *= 3;
  EXPECT_NEAR(estimate_power(r, t).watts - base.watts, 2 * 450.0 * 1e-12, 1e-22);
  EXPECT_TRUE(base.calibration_assumed);
  EXPECT_THROW(estimate_power({-1.0, 0, 0}, t), DomainError);
  t.frac_mux = 0.5;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Events, OneSpikeEightDelays) {
  auto m = shaped_denram(1, 8, 1);
  data::LabeledRasterSet set;
  SpikeRaster r(1, 20, 1e-3);
  r.add(0, 3);
  set.samples.push_back({r, 0});
  const auto s = count_events(m, set);
  EXPECT_EQ(s.dendritic_events, 8.0);
  EXPECT_EQ(s.neuron_updates, 20.0);
  EXPECT_NEAR(s.simulated_seconds, 20e-3, 1e-15);
  EXPECT_EQ(count_events(m, data::LabeledRasterSet{}).dendritic_events, 0.0);
  EXPECT_EQ(rates_of(count_events(m, data::LabeledRasterSet{})).dendritic_events_per_s, 0.0);
}

TEST(Events, MatchesExpandedRecount) {
  Rng rng(3);
  std::uniform_int_distribution<int> sh(0, 9);
  Eigen::MatrixXi shifts(3, 4);
  for (Eigen::Index i = 0; i < shifts.size(); ++i) shifts(i) = sh(rng);
  DenramModel m;
  m.bank = DelayBank::from_shifts(shifts, 1e-3);
  m.weights = Eigen::MatrixXd::Ones(12, 2);
  data::LabeledRasterSet set;
  double recount = 0.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    SpikeRaster r(3, 30, 1e-3);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t t = 0; t < 30; ++t) {
        if (u(rng) < 0.2) r.add(c, t);
      }
    }
    recount += static_cast<double>(oracle::brute_expand(r, shifts).total());
    set.samples.push_back({r, 0});
  }
  EXPECT_EQ(count_events(m, set).dendritic_events, recount);
}

TEST(Events, SrnnSynopsFollowHiddenSpikes) {
  auto m = shaped_srnn(1, 2, 1);
  m.w_in(0, 0) = 5.0;  // hidden 0 fires on every input spike
  data::LabeledRasterSet set;
  SpikeRaster r(1, 10, 1e-3);
  r.add(0, 1);
  r.add(0, 5);
  set.samples.push_back({r, 0});
  const auto s = count_events(m, set);
  EXPECT_EQ(s.synops, 2.0 * 3.0);
  EXPECT_EQ(s.neuron_updates, 10.0 * 3.0);
  EXPECT_EQ(s.dendritic_events, 0.0);
}

TEST(Aggregate, SingleDelayAndZeroWeights) {
  Eigen::MatrixXi shifts(2, 1);
  shifts << 2, 5;
  DenramModel m;
  m.bank = DelayBank::from_shifts(shifts, 1e-3);
  m.weights = Eigen::MatrixXd(2, 1);
  m.weights << 0.3, -0.7;
  const auto p = aggregate_weight_delay(m, 0);
  ASSERT_EQ(p.cols(), 6);
  EXPECT_EQ(p(0, 2), 0.3);
  EXPECT_EQ(p(1, 5), -0.7);
  EXPECT_EQ((p.array() != 0.0).count(), 2);
  m.weights.setZero();
  EXPECT_TRUE(aggregate_weight_delay(m, 0).isZero(0.0));
  EXPECT_THROW(aggregate_weight_delay(m, 1), DomainError);
}

TEST(Aggregate, ConvolutionReproducesCurrent) {
  Rng rng(4);
  std::uniform_int_distribution<int> sh(0, 12);
  std::uniform_real_distribution<double> w(-1.0, 1.0), u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXi shifts(4, 5);
    for (Eigen::Index i = 0; i < shifts.size(); ++i) shifts(i) = sh(rng);
    DenramModel m;
    m.bank = DelayBank::from_shifts(shifts, 1e-3);
    m.weights.resize(20, 2);
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights(i) = w(rng);
    SpikeRaster r(4, 40, 1e-3);
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t t = 0; t < 40; ++t) {
        if (u(rng) < 0.15) r.add(c, t);
      }
    }
    const Eigen::MatrixXd current = dendrite::dendritic_current_events(r, m.bank, m.weights);
    for (std::size_t o = 0; o < 2; ++o) {
      const auto conv = oracle::convolve_profiles(r, aggregate_weight_delay(m, o));
      ASSERT_EQ(static_cast<Eigen::Index>(conv.size()), current.cols());
      for (std::size_t t = 0; t < conv.size(); ++t) {
        EXPECT_NEAR(conv[t], current(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(t)), 1e-12);
      }
    }
  }
}

DenramTask tiny_task() {
  Rng rng(5);
  const std::vector<double> lags{10e-3, 30e-3};
  DenramTask task;
  task.train = data::synth_coincidence_dataset(40, lags, 1e-3, 1e-3, 100, rng);
  task.val = data::synth_coincidence_dataset(10, lags, 1e-3, 1e-3, 100, rng);
  task.test = data::synth_coincidence_dataset(10, lags, 1e-3, 1e-3, 100, rng);
  task.eval_realizations = 2;
  return task;
}

TEST(Sweep, GridShapeAndReproducibility) {
  const auto task = tiny_task();
  learn::TrainConfig cfg;
  cfg.epochs_pretrain = 2;
  cfg.epochs_noise_aware = 1;
  cfg.batch_size = 8;
  const std::vector<double> means{10e-3, 30e-3};
  const std::vector<double> sigmas{0.5};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto a = sweep_delay_distribution(task, means, sigmas, cfg, seeds);
  const auto b = sweep_delay_distribution(task, means, sigmas, cfg, seeds);
  EXPECT_EQ(a.cells.size(), 6u);
  EXPECT_EQ(a.summary.size(), 2u);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  const auto csv = sweep_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mean_s,sigma,seed,accuracy");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);

  const std::vector<double> one{20e-3};
  const std::vector<std::uint64_t> one_seed{4};
  EXPECT_EQ(sweep_delay_distribution(task, one, sigmas, cfg, one_seed).cells.size(), 1u);
  EXPECT_THROW(sweep_delay_distribution(task, {}, sigmas, cfg, seeds), ConfigError);
}

TEST(Sweep, HiddenSizeGrid) {
  const auto dt = tiny_task();
  SrnnTask task;
  task.train = dt.train;
  task.val = dt.val;
  task.test = dt.test;
  task.eval_realizations = 1;
  learn::TrainConfig cfg;
  cfg.epochs_pretrain = 1;
  cfg.epochs_noise_aware = 0;
  const std::vector<std::size_t> sizes{2, 4};
  const std::vector<std::uint64_t> seeds{1};
  const auto a = sweep_hidden_size(task, sizes, cfg, seeds);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(hidden_sweep_csv(a), hidden_sweep_csv(sweep_hidden_size(task, sizes, cfg, seeds)));
}

}  // namespace
}  // namespace denram::analysis

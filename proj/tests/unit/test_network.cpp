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
#include <numeric>
#include <random>

#include "../support/oracles.hpp"
#include "denram/error.hpp"
#include "denram/network.hpp"

namespace denram::network {
namespace {

using dendrite::DelayBank;
using dendrite::SpikeRaster;

Eigen::MatrixXd uniform(Eigen::Index r, Eigen::Index c, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
  return m;
}

SpikeRaster bernoulli_raster(std::size_t n_ch, std::size_t n_steps, double p, Rng& rng) {
  SpikeRaster r(n_ch, n_steps, 1e-3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t c = 0; c < n_ch; ++c) {
    for (std::size_t t = 0; t < n_steps; ++t) {
      if (u(rng) < p) r.add(c, t);
    }
  }
  return r;
}

DenramModel random_denram(std::size_t n_in, std::size_t n_d, std::size_t n_out, Rng& rng) {
  std::uniform_int_distribution<int> s(0, 10);
  Eigen::MatrixXi shifts(n_in, n_d);
  for (Eigen::Index i = 0; i < shifts.size(); ++i) shifts(i) = s(rng);
  DenramModel m;
  m.bank = DelayBank::from_shifts(shifts, 1e-3);
  m.weights = uniform(static_cast<Eigen::Index>(n_in * n_d), static_cast<Eigen::Index>(n_out), -1, 1, rng);
  m.alpha_out = 0.9;
  return m;
}

TEST(Lif, ZeroCurrentStaysSilent) {
  const auto out = lif_forward(Eigen::MatrixXd::Zero(3, 20), LifParams{});
  EXPECT_TRUE(out.spikes.isZero(0.0));
  EXPECT_TRUE(out.potentials.isZero(0.0));
}

TEST(Lif, ResetAfterSpike) {
  Eigen::MatrixXd I = Eigen::MatrixXd::Zero(1, 3);
  I(0, 0) = 2.0;
  I(0, 1) = 0.3;
  const auto out = lif_forward(I, {0.9, 1.0, 0});
  EXPECT_EQ(out.spikes(0, 0), 1.0);
  EXPECT_EQ(out.potentials(0, 0), 2.0);
  EXPECT_EQ(out.potentials(0, 1), 0.3);
}

TEST(Lif, MatchesScalarReference) {
  Rng rng(1);
  for (int refractory : {0, 2}) {
    const Eigen::MatrixXd I = uniform(4, 50, -0.2, 0.8, rng);
    const auto out = lif_forward(I, {0.85, 1.0, refractory});
    const auto ref = oracle::scalar_lif(I, 0.85, 1.0, refractory);
    for (Eigen::Index n = 0; n < 4; ++n) {
      for (Eigen::Index t = 0; t < 50; ++t) {
        EXPECT_EQ(out.potentials(n, t), ref.v[n][t]);
        EXPECT_EQ(out.spikes(n, t), ref.s[n][t]);
      }
    }
  }
}

TEST(Lif, RefractoryBlocksFiring) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Constant(1, 10, 5.0);
  const auto out = lif_forward(I, {0.9, 1.0, 2});
  const std::vector<double> expected{1, 0, 0, 1, 0, 0, 1, 0, 0, 1};
  for (Eigen::Index t = 0; t < 10; ++t) EXPECT_EQ(out.spikes(0, t), expected[static_cast<std::size_t>(t)]);
}

TEST(Lif, MembraneBoundForPositiveCurrents) {
  Rng rng(2);
  const double i_max = 0.7, alpha = 0.93;
  const Eigen::MatrixXd I = uniform(8, 300, 0.0, i_max, rng);
  const auto out = lif_forward(I, {alpha, 5.0, 0});
  EXPECT_LE(out.potentials.maxCoeff(), i_max / (1 - alpha) + i_max);
}

TEST(Readout, GeometricSeriesAndScalarOracle) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(1, 400, 0.5);
  const auto u = leaky_readout(c, 0.9);
  EXPECT_NEAR(u(0, 399), 0.5 / 0.1, 1e-12);
  EXPECT_EQ(leaky_readout(c, 0.0), c);
  Rng rng(3);
  const Eigen::MatrixXd r = uniform(3, 40, -1, 1, rng);
  const auto ref = oracle::scalar_leaky(r, 0.77);
  const auto got = leaky_readout(r, 0.77);
  for (Eigen::Index n = 0; n < 3; ++n) {
    for (Eigen::Index t = 0; t < 40; ++t) EXPECT_EQ(got(n, t), ref[n][t]);
  }
}

TEST(DenramForward, ZeroRasterGivesZeroLogits) {
  Rng rng(4);
  const auto m = random_denram(2, 3, 2, rng);
  const auto out = denram_forward(m, SpikeRaster(2, 10, 1e-3));
  EXPECT_TRUE(out.logits.isZero(0.0));
}

TEST(DenramForward, SingleEventPeakIsWeight) {
  DenramModel m;
  m.bank = DelayBank::from_shifts(Eigen::MatrixXi::Constant(1, 1, 3), 1e-3);
  m.weights = Eigen::MatrixXd::Constant(1, 1, 0.42);
  for (double alpha : {0.1, 0.5, 0.95}) {
    m.alpha_out = alpha;
    SpikeRaster r(1, 8, 1e-3);
    r.add(0, 2);
    EXPECT_EQ(denram_forward(m, r).logits(0), 0.42);
  }
}

TEST(DenramForward, EqualsStageComposition) {
  Rng rng(5);
  const auto m = random_denram(2, 8, 2, rng);
  const auto r = bernoulli_raster(2, 60, 0.1, rng);
  const auto expanded = oracle::brute_expand(r, m.bank.shifts());
  const auto current = oracle::brute_current(expanded, m.weights);
  const auto u = oracle::scalar_leaky(current, m.alpha_out);
  const auto out = denram_forward(m, r);
  for (std::size_t o = 0; o < 2; ++o) {
    EXPECT_EQ(out.logits(static_cast<Eigen::Index>(o)), *std::max_element(u[o].begin(), u[o].end()));
  }
}

TEST(DenramForward, SpikeCountModeCountsLifSpikes) {
  Rng rng(6);
  auto m = random_denram(3, 4, 2, rng);
  m.readout = ReadoutMode::SpikeCount;
  m.lif = {0.9, 0.5, 0};
  const auto r = bernoulli_raster(3, 50, 0.2, rng);
  const auto current = oracle::brute_current(oracle::brute_expand(r, m.bank.shifts()), m.weights);
  const auto ref = oracle::scalar_lif(current, 0.9, 0.5, 0);
  const auto out = denram_forward(m, r);
  for (std::size_t o = 0; o < 2; ++o) {
    EXPECT_EQ(out.logits(static_cast<Eigen::Index>(o)), std::accumulate(ref.s[o].begin(), ref.s[o].end(), 0));
  }
}

TEST(DenramForward, ExpandedChannelPermutationInvariant) {
  Rng rng(7);
  const auto m = random_denram(3, 4, 2, rng);
  const auto r = bernoulli_raster(3, 40, 0.2, rng);
  // Permute delay columns within each input and the matching weight rows.
  const std::vector<int> perm{2, 0, 3, 1};
  DenramModel p = m;
  Eigen::MatrixXi shifts(3, 4);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      shifts(i, j) = m.bank.shift(i, perm[j]);
      p.weights.row(i * 4 + j) = m.weights.row(i * 4 + perm[j]);
    }
  }
  p.bank = DelayBank::from_shifts(shifts, 1e-3);
  EXPECT_EQ(denram_forward(m, r).logits, denram_forward(p, r).logits);
}

TEST(DenramForward, PositiveScalingScalesLogits) {
  Rng rng(8);
  auto m = random_denram(2, 4, 3, rng);
  const auto r = bernoulli_raster(2, 30, 0.2, rng);
  const auto base = denram_forward(m, r).logits;
  m.weights *= 2.5;
  const auto scaled = denram_forward(m, r).logits;
  EXPECT_TRUE(scaled.isApprox(2.5 * base, 1e-12));
  EXPECT_EQ(predict_class(scaled, 0.0), predict_class(base, 0.0));
}

TEST(DenramForward, ShapeErrors) {
  Rng rng(9);
  const auto m = random_denram(2, 3, 1, rng);
  EXPECT_THROW(denram_forward(m, SpikeRaster(3, 10, 1e-3)), DomainError);
  EXPECT_THROW(denram_forward(m, SpikeRaster(2, 10, 2e-3)), DomainError);
}

SrnnModel random_srnn(std::size_t n_in, std::size_t n_h, std::size_t n_out, Rng& rng) {
  SrnnModel m;
  m.w_in = uniform(static_cast<Eigen::Index>(n_in), static_cast<Eigen::Index>(n_h), -0.5, 1.5, rng);
  m.w_rec = uniform(static_cast<Eigen::Index>(n_h), static_cast<Eigen::Index>(n_h), -0.8, 0.8, rng);
  m.w_out = uniform(static_cast<Eigen::Index>(n_h), static_cast<Eigen::Index>(n_out), -1, 1, rng);
  m.lif_hidden = {0.9, 1.0, 0};
  m.alpha_out = 0.8;
  return m;
}

TEST(SrnnForward, MatchesReferenceInterpreter) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_srnn(2, 3, 2, rng);
    m.lif_hidden.refractory_bins = trial % 3;
    const auto r = bernoulli_raster(2, 10, 0.4, rng);
    const auto ref = oracle::scalar_srnn(m, r);
    const auto out = srnn_forward(m, r);
    for (std::size_t t = 0; t < 10; ++t) {
      for (std::size_t h = 0; h < 3; ++h) {
        ASSERT_EQ(out.spikes(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(t)), ref.hidden_spikes[t][h]);
      }
    }
    for (Eigen::Index o = 0; o < 2; ++o) EXPECT_NEAR(out.logits(o), ref.logits[static_cast<std::size_t>(o)], 1e-12);
  }
}

TEST(SrnnForward, NoRecurrenceEqualsFeedForward) {
  Rng rng(11);
  auto m = random_srnn(3, 5, 2, rng);
  m.w_rec.setZero();
  const auto r = bernoulli_raster(3, 40, 0.3, rng);
  const Eigen::MatrixXd hidden_current = m.w_in.transpose() * r.to_matrix();
  const auto hidden = lif_forward(hidden_current, m.lif_hidden);
  const Eigen::MatrixXd out_current = m.w_out.transpose() * hidden.spikes;
  const Eigen::VectorXd logits = leaky_readout(out_current, m.alpha_out).rowwise().maxCoeff();
  const auto out = srnn_forward(m, r);
  EXPECT_EQ(out.spikes, hidden.spikes);
  EXPECT_TRUE(out.logits.isApprox(logits, 1e-14));
}

TEST(SrnnForward, ZeroInputZeroLogits) {
  Rng rng(12);
  const auto m = random_srnn(2, 4, 2, rng);
  EXPECT_TRUE(srnn_forward(m, SpikeRaster(2, 15, 1e-3)).logits.isZero(0.0));
  EXPECT_THROW(srnn_forward(m, SpikeRaster(3, 15, 1e-3)), DomainError);
}

TEST(Predict, ArgmaxAndThreshold) {
  Eigen::VectorXd z(3);
  z << 0.1, 0.5, 0.5;
  EXPECT_EQ(predict_class(z, 0.0), 1);
  Eigen::VectorXd one(1);
  one << 0.3;
  EXPECT_EQ(predict_class(one, 0.2), 1);
  EXPECT_EQ(predict_class(one, 0.3), 0);
}

std::vector<bool> lag_sweep(const CoincidenceSetup& s) {
  std::vector<bool> fired;
  for (int lag_ms = 0; lag_ms <= 120; ++lag_ms) fired.push_back(coincidence_experiment(s, lag_ms * 1e-3).fired);
  return fired;
}

int window_width(const std::vector<bool>& fired) { return static_cast<int>(std::count(fired.begin(), fired.end(), true)); }

bool contiguous(const std::vector<bool>& fired) {
  int runs = 0;
  for (std::size_t k = 0; k < fired.size(); ++k) runs += fired[k] && (k == 0 || !fired[k - 1]);
  return runs <= 1;
}

TEST(Coincidence, FiresOnlyNearProgrammedDelay) {
  const auto s = default_coincidence_setup();
  EXPECT_TRUE(coincidence_experiment(s, 58e-3).fired);
  EXPECT_FALSE(coincidence_experiment(s, 0.0).fired);
  EXPECT_FALSE(coincidence_experiment(s, 120e-3).fired);
  const auto fired = lag_sweep(s);
  EXPECT_TRUE(contiguous(fired));
  EXPECT_TRUE(fired[58]);
}

TEST(Coincidence, HrsConfigurationSuppresses) {
  EXPECT_FALSE(coincidence_experiment(separation_coincidence_setup(), 58e-3).fired);
}

TEST(Coincidence, WindowShrinksAsThresholdRises) {
  auto s = default_coincidence_setup();
  const double base = s.lif.v_threshold;
  int prev = 1 << 30;
  for (double scale : {0.9, 0.95, 1.0, 1.05, 1.1, 1.2}) {
    s.lif.v_threshold = base * scale;
    const auto fired = lag_sweep(s);
    EXPECT_TRUE(contiguous(fired));
    const int w = window_width(fired);
    EXPECT_LE(w, prev);
    prev = w;
  }
}

}  // namespace
}  // namespace denram::network

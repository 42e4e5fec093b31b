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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "denram/device.hpp"
#include "denram/error.hpp"

namespace denram::device {
namespace {

double log_std(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += std::log(x);
  m /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (std::log(x) - m) * (std::log(x) - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

TEST(Delays, FromMeanMatchesLinearMean) {
  const auto d = DelayDistribution::from_mean(22e-3, 0.5);
  EXPECT_NEAR(d.mu, std::log(22e-3) - 0.125, 1e-15);
  EXPECT_NEAR(d.linear_mean(), 22e-3, 1e-15);
  EXPECT_NEAR(d.median(), std::exp(d.mu), 1e-18);
}

TEST(Delays, UnclippedSampleStatistics) {
  Rng rng(7);
  const auto xs = sample_delays(DelayDistribution::from_mean(22e-3, 0.5), 200000, rng);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  EXPECT_NEAR(mean, 22e-3, 0.25e-3);
  EXPECT_NEAR(log_std(xs), 0.5, 0.005);
}

TEST(Delays, ClippingNeverEscapesBounds) {
  Rng rng(11);
  const auto d = measured_delay_distribution();
  const auto xs = sample_delays(d, 1000000, rng);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  EXPECT_GE(*lo, 8.08e-3);
  EXPECT_LE(*hi, 58.26e-3);
  // Clipping keeps every draw.
  EXPECT_EQ(xs.size(), 1000000u);
  EXPECT_EQ(*lo, 8.08e-3);
  EXPECT_EQ(*hi, 58.26e-3);
}

TEST(Delays, DeterministicUnderSeed) {
  Rng a(3), b(3);
  EXPECT_EQ(sample_delays(measured_delay_distribution(), 100, a),
            sample_delays(measured_delay_distribution(), 100, b));
}

TEST(Delays, RejectsBadParameters) {
  Rng rng(0);
  EXPECT_THROW(sample_delays(measured_delay_distribution(), 0, rng), ConfigError);
  EXPECT_ANY_THROW(DelayDistribution::from_mean(-1.0, 0.5));
  EXPECT_ANY_THROW(DelayDistribution::from_mean(1.0, 0.5, 2.0, 1.0));
}

TEST(Delays, ResistanceFromDelayRoundTripsForPowersOfTwo) {
  for (int a = -12; a <= 0; ++a) {
    for (int b = -44; b <= -30; b += 2) {
      const double d = std::ldexp(1.0, a);
      const double c = std::ldexp(1.0, b);
      EXPECT_EQ(resistance_from_delay(d, c) * c, d);
    }
  }
  EXPECT_THROW(resistance_from_delay(0.0, 1e-12), DomainError);
  EXPECT_THROW(resistance_from_delay(1e-3, 0.0), DomainError);
}

TEST(Programming, SetLevelsSpanLrsBand) {
  Rng rng(5);
  const auto low = program_set(7, rng);
  const auto high = program_set(0, rng);
  EXPECT_EQ(low.mode, DeviceMode::LRS);
  const auto [lo7, hi7] = set_level_band(7);
  EXPECT_DOUBLE_EQ(lo7, 8e3);
  EXPECT_GE(low.resistance(), lo7 * (1 - 1e-12));
  EXPECT_LE(low.resistance(), hi7 * (1 + 1e-12));
  const auto [lo0, hi0] = set_level_band(0);
  EXPECT_DOUBLE_EQ(hi0, 50e3);
  EXPECT_GE(high.resistance(), lo0 * (1 - 1e-12));
  EXPECT_LE(high.resistance(), hi0 * (1 + 1e-12));
  EXPECT_THROW(program_set(8, rng), DomainError);
  EXPECT_THROW(program_set(-1, rng), DomainError);
}

TEST(Programming, BandsTileTheLrsWindowLogarithmically) {
  double prev_lo = 50e3;
  for (int level = 0; level < kSetLevels; ++level) {
    const auto [lo, hi] = set_level_band(level);
    EXPECT_NEAR(hi, prev_lo, 1e-6);
    EXPECT_NEAR(std::log(hi / lo), std::log(50.0 / 8.0) / kSetLevels, 1e-12);
    prev_lo = lo;
  }
}

TEST(Programming, MedianResistanceFallsWithLevel) {
  std::vector<double> medians;
  for (int level = 0; level < kSetLevels; ++level) {
    Rng rng(derive_seed(99, static_cast<std::uint64_t>(level)));
    std::vector<double> r;
    for (int k = 0; k < 10000; ++k) r.push_back(program_set(level, rng).resistance());
    std::nth_element(r.begin(), r.begin() + 5000, r.end());
    medians.push_back(r[5000]);
  }
  for (int level = 0; level + 1 < kSetLevels; ++level) EXPECT_LT(medians[level + 1], medians[level]);
}

TEST(Programming, ResetStaysInHrsWindow) {
  Rng rng(1);
  double lo = 1e30, hi = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto s = program_reset(rng);
    ASSERT_EQ(s.mode, DeviceMode::HRS);
    ASSERT_TRUE(is_consistent(s));
    lo = std::min(lo, s.resistance());
    hi = std::max(hi, s.resistance());
  }
  EXPECT_GE(lo, 60e3);
  EXPECT_LE(hi, 1e6);
  // Log-uniform over a 16.7x range: 10k draws reach within 1% of both edges.
  EXPECT_LT(lo, 60e3 * 1.01);
  EXPECT_GT(hi, 1e6 / 1.01);
  Rng a(4), b(4);
  EXPECT_EQ(program_reset(a).conductance, program_reset(b).conductance);
}

TEST(Programming, PristineNeedsGigaohms) {
  EXPECT_EQ(make_pristine(40e9).mode, DeviceMode::Pristine);
  EXPECT_ANY_THROW(make_pristine(1e6));
}

TEST(ReadNoise, ZeroStdIsIdentity) {
  Rng rng(0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Random(5, 3);
  EXPECT_EQ(apply_read_noise(w, {0.0, 0}, rng), w);
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(4, 4);
  EXPECT_EQ(apply_read_noise(zeros, {0.2, 0}, rng), zeros);
}

TEST(ReadNoise, StdScalesWithLayerMax) {
  Rng rng(21);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1000, 1000);
  w(0, 0) = 2.0;
  w(5, 5) = -1.0;
  const Eigen::MatrixXd out = apply_read_noise(w, {0.1, 0}, rng);
  const Eigen::ArrayXXd diff = (out - w).array();
  const double n = static_cast<double>(diff.size());
  const double mean = diff.sum() / n;
  const double sd = std::sqrt((diff - mean).square().sum() / (n - 1));
  EXPECT_GE(sd, 0.198);
  EXPECT_LE(sd, 0.202);
  EXPECT_LT(std::abs(mean), 3 * 0.2 / std::sqrt(n));
  EXPECT_EQ(out.rows(), 1000);
}

TEST(ReadNoise, InputUntouched) {
  Rng rng(2);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(3, 3, 1.5);
  const Eigen::MatrixXd copy = w;
  (void)apply_read_noise(w, {0.3, 0}, rng);
  EXPECT_EQ(w, copy);
}

TEST(Fit, RecoversSmallSampleSigma) {
  Rng rng(71);
  const auto xs = sample_delays(DelayDistribution::from_mean(22e-3, 0.5), 71, rng);
  const auto fit = fit_lognormal(xs);
  EXPECT_GE(fit.sigma, 0.35);
  EXPECT_LE(fit.sigma, 0.65);
}

TEST(Fit, LargeSampleRecoversParameters) {
  Rng rng(8);
  std::normal_distribution<double> n(std::log(0.01), 0.3);
  std::vector<double> xs(1000000);
  for (auto& x : xs) x = std::exp(n(rng));
  const auto fit = fit_lognormal(xs);
  EXPECT_NEAR(fit.mu, std::log(0.01), 1e-2);
  EXPECT_NEAR(fit.sigma, 0.3, 1e-2);
}

TEST(Fit, IdenticalSamplesGiveZeroSigma) {
  const std::vector<double> xs(10, 0.022);
  EXPECT_EQ(fit_lognormal(xs).sigma, 0.0);
  const std::vector<double> bad{0.01, -0.02};
  EXPECT_THROW(fit_lognormal(bad), DomainError);
}

}  // namespace
}  // namespace denram::device

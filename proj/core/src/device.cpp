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

#include "denram/device.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "denram/error.hpp"

namespace denram::device {

void ResistanceBands::validate() const {
  if (!(lrs_min > 0 && lrs_min < lrs_max && lrs_max < hrs_min && hrs_min < hrs_max &&
        hrs_max < pristine_min)) {
    throw ConfigError("resistance bands must be ordered 0 < LRS < HRS < pristine");
  }
  if (!(set_jitter_sigma >= 0)) throw ConfigError("set_jitter_sigma must be >= 0");
}

bool is_consistent(const DeviceState& state, const ResistanceBands& bands) {
  if (!(state.conductance > 0)) return false;
  const double r = state.resistance();
  switch (state.mode) {
    case DeviceMode::LRS:
      return r >= bands.lrs_min && r <= bands.lrs_max && state.level >= 0 &&
             state.level < kSetLevels;
    case DeviceMode::HRS:
      return r >= bands.hrs_min && r <= bands.hrs_max;
    case DeviceMode::Pristine:
      return r >= bands.pristine_min;
  }
  return false;
}

DelayDistribution DelayDistribution::from_mean(double mean_seconds, double sigma,
                                               double clip_min, double clip_max) {
  if (!(mean_seconds > 0)) throw ConfigError("delay distribution mean must be > 0");
  DelayDistribution d;
  d.sigma = sigma;
  d.mu = std::log(mean_seconds) - 0.5 * sigma * sigma;
  d.clip_min = clip_min;
  d.clip_max = clip_max;
  d.validate();
  return d;
}

double DelayDistribution::linear_mean() const { return std::exp(mu + 0.5 * sigma * sigma); }

double DelayDistribution::median() const { return std::exp(mu); }

void DelayDistribution::validate() const {
  if (!std::isfinite(mu)) throw ConfigError("delay distribution mu must be finite");
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw ConfigError("delay distribution sigma must be > 0");
  }
  if (!(clip_min >= 0) || !(clip_min < clip_max)) {
    throw ConfigError("delay distribution needs 0 <= clip_min < clip_max");
  }
}

DelayDistribution measured_delay_distribution() {
  return DelayDistribution::from_mean(22e-3, 0.5, 8.08e-3, 58.26e-3);
}

std::vector<double> sample_delays(const DelayDistribution& dist, std::size_t n, Rng& rng) {
  dist.validate();
  if (n == 0) throw ConfigError("sample_delays needs n >= 1");
  std::normal_distribution<double> normal(dist.mu, dist.sigma);
  std::vector<double> out(n);
  for (auto& d : out) d = std::clamp(std::exp(normal(rng)), dist.clip_min, dist.clip_max);
  return out;
}

double resistance_from_delay(double delay_seconds, double capacitance_farads) {
  if (!(delay_seconds > 0) || !(capacitance_farads > 0)) {
    throw DomainError("resistance_from_delay needs delay > 0 and C > 0");
  }
  return delay_seconds / capacitance_farads;
}

DeviceState make_pristine(double resistance_ohms, const ResistanceBands& bands) {
  if (!(resistance_ohms >= bands.pristine_min)) {
    std::ostringstream msg;
    msg << "pristine resistance " << resistance_ohms << " below " << bands.pristine_min;
    throw DomainError(msg.str());
  }
  return {DeviceMode::Pristine, 1.0 / resistance_ohms, 0};
}

std::pair<double, double> set_level_band(int level, const ResistanceBands& bands) {
  if (level < 0 || level >= kSetLevels) {
    throw DomainError("SET level must be in [0, 7], got " + std::to_string(level));
  }
  // Level 7 -> sub-band 0 (lowest resistance).
  const int band = kSetLevels - 1 - level;
  const double ratio = bands.lrs_max / bands.lrs_min;
  const double lo = bands.lrs_min * std::pow(ratio, static_cast<double>(band) / kSetLevels);
  const double hi = bands.lrs_min * std::pow(ratio, static_cast<double>(band + 1) / kSetLevels);
  return {lo, band + 1 == kSetLevels ? bands.lrs_max : hi};
}

double nominal_set_resistance(int level, const ResistanceBands& bands) {
  const auto [lo, hi] = set_level_band(level, bands);
  return std::sqrt(lo * hi);
}

double nominal_reset_resistance(const ResistanceBands& bands) {
  return std::sqrt(bands.hrs_min * bands.hrs_max);
}

DeviceState program_set(int level, Rng& rng, const ResistanceBands& bands) {
  const auto [lo, hi] = set_level_band(level, bands);
  std::normal_distribution<double> jitter(0.0, bands.set_jitter_sigma);
  const double r = std::clamp(std::sqrt(lo * hi) * std::exp(jitter(rng)), lo, hi);
  return {DeviceMode::LRS, 1.0 / r, level};
}

DeviceState program_reset(Rng& rng, const ResistanceBands& bands) {
  std::uniform_real_distribution<double> u(std::log(bands.hrs_min), std::log(bands.hrs_max));
  const double r = std::clamp(std::exp(u(rng)), bands.hrs_min, bands.hrs_max);
  return {DeviceMode::HRS, 1.0 / r, 0};
}

void NoiseModel::validate() const {
  if (!(relative_std >= 0) || !std::isfinite(relative_std)) {
    throw ConfigError("noise relative_std must be >= 0");
  }
}

Eigen::MatrixXd apply_read_noise(const Eigen::MatrixXd& weights, const NoiseModel& model,
                                 Rng& rng) {
  model.validate();
  Eigen::MatrixXd out = weights;
  if (weights.size() == 0) return out;
  const double sigma = model.relative_std * weights.cwiseAbs().maxCoeff();
  if (sigma == 0.0) return out;
  std::normal_distribution<double> normal(0.0, sigma);
  // Column-major element order fixes the draw sequence.
  for (Eigen::Index k = 0; k < out.size(); ++k) out.data()[k] += normal(rng);
  return out;
}

LogNormalFit fit_lognormal(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("fit_lognormal needs at least 2 samples");
  for (double s : samples) {
    if (!(s > 0)) throw DomainError("fit_lognormal needs positive samples");
  }
  // Shifted by the first log-sample so identical inputs give sigma == 0 exactly.
  const double origin = std::log(samples.front());
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double s : samples) sum += std::log(s) - origin;
  const double shift = sum / n;
  double ss = 0.0;
  for (double s : samples) {
    const double d = (std::log(s) - origin) - shift;
    ss += d * d;
  }
  return {origin + shift, std::sqrt(ss / n)};
}

}  // namespace denram::device

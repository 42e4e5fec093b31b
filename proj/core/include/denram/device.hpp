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

#ifndef DENRAM_DEVICE_HPP_
#define DENRAM_DEVICE_HPP_

// Statistical models of the RRAM devices used by the dendritic circuit: the
// pristine-state delay population, LRS/HRS programming of weight devices and
// the read-noise perturbation applied during noise-aware training.

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "denram/random.hpp"

namespace denram::device {

enum class DeviceMode { Pristine, LRS, HRS };

// Resistance bands in ohms. Defaults are the measured programming windows.
struct ResistanceBands {
  double lrs_min = 8e3;
  double lrs_max = 50e3;
  double hrs_min = 60e3;
  double hrs_max = 1e6;
  double pristine_min = 1e9;
  // Log-space std of the multiplicative jitter inside one SET sub-band.
  double set_jitter_sigma = 0.05;

  void validate() const;
};

inline constexpr int kSetLevels = 8;

struct DeviceState {
  DeviceMode mode = DeviceMode::Pristine;
  double conductance = 1e-10;  // siemens
  int level = 0;               // SET level, meaningful for LRS only

  double resistance() const { return 1.0 / conductance; }
};

// Checks the mode/resistance invariants against `bands`.
bool is_consistent(const DeviceState& state, const ResistanceBands& bands = {});

// Log-normal delay population. mu/sigma parameterize the underlying normal
// over delay-in-seconds; samples are clamped to [clip_min, clip_max].
struct DelayDistribution {
  double mu = 0.0;
  double sigma = 0.5;
  double clip_min = 0.0;
  double clip_max = std::numeric_limits<double>::infinity();

  // Builds a distribution whose linear-space mean (before clipping) equals
  // `mean_seconds`: mu = ln(mean) - sigma^2 / 2.
  static DelayDistribution from_mean(
      double mean_seconds, double sigma, double clip_min = 0.0,
      double clip_max = std::numeric_limits<double>::infinity());

  double linear_mean() const;
  double median() const;
  void validate() const;
};

// Measured pristine-delay statistics: 22 ms mean, log-space sigma 0.5,
// observed extremes 8.08 ms and 58.26 ms.
DelayDistribution measured_delay_distribution();

std::vector<double> sample_delays(const DelayDistribution& dist, std::size_t n, Rng& rng);

// R = D / C.
double resistance_from_delay(double delay_seconds, double capacitance_farads);

DeviceState make_pristine(double resistance_ohms, const ResistanceBands& bands = {});

// Sub-band [lo, hi] in ohms of SET level `level`; level 7 is the lowest band.
std::pair<double, double> set_level_band(int level, const ResistanceBands& bands = {});

DeviceState program_set(int level, Rng& rng, const ResistanceBands& bands = {});
DeviceState program_reset(Rng& rng, const ResistanceBands& bands = {});

// Geometric centres of the bands, used where a deterministic nominal
// conductance is wanted (e.g. the coincidence-detection demo).
double nominal_set_resistance(int level, const ResistanceBands& bands = {});
double nominal_reset_resistance(const ResistanceBands& bands = {});

struct NoiseModel {
  double relative_std = 0.0;  // fraction of max |w| in the layer
  std::uint64_t seed = 0;

  void validate() const;
};

// out = w + N(0, (relative_std * max|w|)^2), i.i.d. per element.
Eigen::MatrixXd apply_read_noise(const Eigen::MatrixXd& weights, const NoiseModel& model,
                                 Rng& rng);

struct LogNormalFit {
  double mu = 0.0;
  double sigma = 0.0;
};

// Maximum-likelihood fit (population std of the log-samples).
LogNormalFit fit_lognormal(std::span<const double> samples);

}  // namespace denram::device

#endif  // DENRAM_DEVICE_HPP_

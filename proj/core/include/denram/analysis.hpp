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

#ifndef DENRAM_ANALYSIS_HPP_
#define DENRAM_ANALYSIS_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "denram/data.hpp"
#include "denram/learn.hpp"
#include "denram/network.hpp"

namespace denram::analysis {

// ---- footprint ----------------------------------------------------------------

enum class DeviceConvention { TwoPerWeightPlusDelay, FourPerSynapse };

std::string to_string(DeviceConvention convention);

struct FootprintReport {
  std::uint64_t trainable_parameters = 0;
  std::uint64_t rram_devices = 0;
  DeviceConvention convention = DeviceConvention::TwoPerWeightPlusDelay;
};

// DenRAM: p = n_in * n_delays * n_out; devices 2p + delay devices (one per
// dendritic circuit, shared across output trees unless the bank is per-tree)
// or 4p. SRNN: p = n_in n_h + n_h^2 + n_h n_out, devices 2p.
FootprintReport count_footprint(const network::DenramModel& model, DeviceConvention convention);
FootprintReport count_footprint(const network::SrnnModel& model, DeviceConvention convention);

// ---- energy / power -----------------------------------------------------------

struct EnergyTable {
  double e_dendritic_event = 58.5e-12;  // J per delayed and weighted event
  double frac_threshold_block = 0.667;
  double frac_rc_and_weight = 0.09;
  double frac_mux = 0.243;
  double e_neuron_update = 2e-12;  // J per LIF step, assumed
  double e_synop = 1e-12;          // J per synaptic accumulation, assumed
  bool neuron_synop_assumed = true;

  void validate() const;
};

struct EventStats {
  double dendritic_events = 0.0;
  double neuron_updates = 0.0;
  double synops = 0.0;
  double simulated_seconds = 0.0;

  double dendritic_rate() const;
  double neuron_update_rate() const;
  double synop_rate() const;
};

struct EventRates {
  double dendritic_events_per_s = 0.0;
  double neuron_updates_per_s = 0.0;
  double synops_per_s = 0.0;
};

struct PowerReport {
  double watts = 0.0;
  double threshold_block = 0.0;
  double rc_and_weight = 0.0;
  double mux = 0.0;
  double neurons = 0.0;
  double synapses = 0.0;
  bool calibration_assumed = false;
};

PowerReport estimate_power(const EventRates& rates, const EnergyTable& table);
EventRates rates_of(const EventStats& stats);

// Runs the forward pass over `dataset`. Dendritic events are the delayed
// spikes reaching the output trees; rates use the simulated time
// (forward steps x dt).
EventStats count_events(const network::DenramModel& model, const data::LabeledRasterSet& dataset);
EventStats count_events(const network::SrnnModel& model, const data::LabeledRasterSet& dataset);

// ---- weighted-delay aggregation -----------------------------------------------

// profile(i, t) = sum_j w((i, j), o) * [shifts(i, j) == t].
Eigen::MatrixXd aggregate_weight_delay(const network::DenramModel& model, std::size_t output);

// ---- sweeps -------------------------------------------------------------------

struct DenramTask {
  data::LabeledRasterSet train;
  data::LabeledRasterSet val;
  data::LabeledRasterSet test;
  std::size_t n_delays = 8;
  std::size_t n_outputs = 2;
  double tau_out = 0.02;
  network::LifParams lif;
  double clip_min = 0.0;
  double clip_max = std::numeric_limits<double>::infinity();
  device::NoiseModel eval_noise{0.1, 0};
  std::size_t eval_realizations = 5;
};

struct SweepCell {
  double mean = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

struct SweepSummary {
  double mean = 0.0;
  double sigma = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
};

struct SweepGrid {
  std::vector<SweepCell> cells;  // ordered mean, sigma, seed
  std::vector<SweepSummary> summary;
};

// For each (mean, sigma, seed): resample the delay bank, train, and evaluate
// under the task's weight noise.
SweepGrid sweep_delay_distribution(const DenramTask& task, std::span<const double> means,
                                   std::span<const double> sigmas,
                                   const learn::TrainConfig& cfg,
                                   std::span<const std::uint64_t> seeds);

std::string sweep_csv(const SweepGrid& grid);

struct SrnnTask {
  data::LabeledRasterSet train;
  data::LabeledRasterSet val;
  data::LabeledRasterSet test;
  std::size_t n_outputs = 2;
  double tau_hidden = 0.02;
  double tau_out = 0.02;
  double v_threshold = 1.0;
  device::NoiseModel eval_noise{0.1, 0};
  std::size_t eval_realizations = 5;
};

struct HiddenSweepCell {
  std::size_t n_hidden = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

std::vector<HiddenSweepCell> sweep_hidden_size(const SrnnTask& task,
                                               std::span<const std::size_t> hidden_sizes,
                                               const learn::TrainConfig& cfg,
                                               std::span<const std::uint64_t> seeds);

std::string hidden_sweep_csv(std::span<const HiddenSweepCell> cells);

}  // namespace denram::analysis

#endif  // DENRAM_ANALYSIS_HPP_

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

#include "denram/analysis.hpp"

#include <cmath>

#include "denram/error.hpp"
#include "denram/parallel.hpp"
#include "denram/random.hpp"
#include "text_util.hpp"

namespace denram::analysis {

using network::DenramModel;
using network::SrnnModel;

std::string to_string(DeviceConvention convention) {
  switch (convention) {
    case DeviceConvention::TwoPerWeightPlusDelay:
      return "two_per_weight_plus_delay";
    case DeviceConvention::FourPerSynapse:
      return "four_per_synapse";
  }
  return "unknown";
}

FootprintReport count_footprint(const DenramModel& model, DeviceConvention convention) {
  FootprintReport r;
  r.convention = convention;
  const std::uint64_t branches = model.n_inputs() * model.n_delays();
  r.trainable_parameters = branches * model.n_outputs();
  if (convention == DeviceConvention::FourPerSynapse) {
    r.rram_devices = 4 * r.trainable_parameters;
  } else {
    const std::uint64_t delay_devices = model.shared_bank ? branches : branches * model.n_outputs();
    r.rram_devices = 2 * r.trainable_parameters + delay_devices;
  }
  return r;
}

FootprintReport count_footprint(const SrnnModel& model, DeviceConvention convention) {
  FootprintReport r;
  r.convention = convention;
  const std::uint64_t h = model.n_hidden();
  r.trainable_parameters = model.n_inputs() * h + h * h + h * model.n_outputs();
  r.rram_devices = 2 * r.trainable_parameters;
  return r;
}

void EnergyTable::validate() const {
  const double sum = frac_threshold_block + frac_rc_and_weight + frac_mux;
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("energy fractions must sum to 1");
  if (frac_threshold_block < 0 || frac_rc_and_weight < 0 || frac_mux < 0) {
    throw ConfigError("energy fractions must be >= 0");
  }
  if (!(e_dendritic_event >= 0) || !(e_neuron_update >= 0) || !(e_synop >= 0)) {
    throw ConfigError("energies must be >= 0");
  }
}

namespace {
double per_second(double count, double seconds) { return seconds > 0 ? count / seconds : 0.0; }
}  // namespace

double EventStats::dendritic_rate() const { return per_second(dendritic_events, simulated_seconds); }
double EventStats::neuron_update_rate() const { return per_second(neuron_updates, simulated_seconds); }
double EventStats::synop_rate() const { return per_second(synops, simulated_seconds); }

EventRates rates_of(const EventStats& stats) {
  return {stats.dendritic_rate(), stats.neuron_update_rate(), stats.synop_rate()};
}

PowerReport estimate_power(const EventRates& rates, const EnergyTable& table) {
  table.validate();
  if (rates.dendritic_events_per_s < 0 || rates.neuron_updates_per_s < 0 || rates.synops_per_s < 0) {
    throw DomainError("event rates must be >= 0");
  }
  PowerReport p;
  const double dendritic = rates.dendritic_events_per_s * table.e_dendritic_event;
  p.threshold_block = dendritic * table.frac_threshold_block;
  p.rc_and_weight = dendritic * table.frac_rc_and_weight;
  p.mux = dendritic * table.frac_mux;
  p.neurons = rates.neuron_updates_per_s * table.e_neuron_update;
  p.synapses = rates.synops_per_s * table.e_synop;
  p.watts = dendritic + p.neurons + p.synapses;
  p.calibration_assumed = table.neuron_synop_assumed && (p.neurons > 0 || p.synapses > 0);
  return p;
}

EventStats count_events(const DenramModel& model, const data::LabeledRasterSet& dataset) {
  EventStats s;
  const double trees = model.shared_bank ? 1.0 : static_cast<double>(model.n_outputs());
  for (const auto& sample : dataset.samples) {
    const auto steps = static_cast<double>(sample.raster.n_steps()) + model.bank.max_shift();
    s.dendritic_events += static_cast<double>(sample.raster.total()) *
                          static_cast<double>(model.n_delays()) * trees;
    s.neuron_updates += steps * static_cast<double>(model.n_outputs());
    s.simulated_seconds += steps * sample.raster.dt();
  }
  return s;
}

EventStats count_events(const SrnnModel& model, const data::LabeledRasterSet& dataset) {
  EventStats s;
  const auto fan_out = static_cast<double>(model.n_hidden() + model.n_outputs());
  for (const auto& sample : dataset.samples) {
    const auto fwd = network::srnn_forward(model, sample.raster);
    const auto steps = static_cast<double>(sample.raster.n_steps());
    s.neuron_updates += steps * fan_out;
    s.synops += fwd.spikes.sum() * fan_out;
    s.simulated_seconds += steps * sample.raster.dt();
  }
  return s;
}

Eigen::MatrixXd aggregate_weight_delay(const DenramModel& model, std::size_t output) {
  if (output >= model.n_outputs()) throw DomainError("output index out of range");
  const auto& bank = model.bank;
  Eigen::MatrixXd profile = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bank.n_channels()),
                                                  bank.max_shift() + 1);
  for (std::size_t i = 0; i < bank.n_channels(); ++i) {
    for (std::size_t j = 0; j < bank.n_delays(); ++j) {
      profile(static_cast<Eigen::Index>(i), bank.shift(i, j)) +=
          model.weights(static_cast<Eigen::Index>(bank.expanded_index(i, j)),
                        static_cast<Eigen::Index>(output));
    }
  }
  return profile;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

void check_task_sets(const data::LabeledRasterSet& train, const data::LabeledRasterSet& test) {
  if (train.empty() || test.empty()) throw ConfigError("sweep task needs non-empty train and test sets");
}

}  // namespace

SweepGrid sweep_delay_distribution(const DenramTask& task, std::span<const double> means,
                                   std::span<const double> sigmas, const learn::TrainConfig& cfg,
                                   std::span<const std::uint64_t> seeds) {
  if (means.empty() || sigmas.empty() || seeds.empty()) throw ConfigError("sweep grids must be non-empty");
  check_task_sets(task.train, task.test);
  cfg.validate();
  const double dt = task.train.dt();
  SweepGrid grid;
  for (double m : means) {
    for (double s : sigmas) {
      for (auto seed : seeds) grid.cells.push_back({m, s, seed, 0.0});
    }
  }
  // Validate distributions up front so errors surface before any training.
  for (const auto& c : grid.cells) (void)device::DelayDistribution::from_mean(c.mean, c.sigma, task.clip_min, task.clip_max);

  parallel_for(grid.cells.size(), [&](std::size_t k) {
    auto& cell = grid.cells[k];
    const auto dist = device::DelayDistribution::from_mean(cell.mean, cell.sigma, task.clip_min, task.clip_max);
    Rng rng(derive_seed(cell.seed, 0));
    DenramModel model{dendrite::DelayBank::sample(dist, task.train.n_channels(), task.n_delays, dt, rng),
                      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(task.train.n_channels() * task.n_delays),
                                            static_cast<Eigen::Index>(task.n_outputs)),
                      task.lif};
    model.alpha_out = std::exp(-dt / task.tau_out);
    model.delay_seed = derive_seed(cell.seed, 0);
    Rng wrng(derive_seed(cell.seed, 1));
    learn::init_weights(model, wrng);
    auto run_cfg = cfg;
    run_cfg.seed = cell.seed;
    const auto& val = task.val.empty() ? task.test : task.val;
    const auto trained = learn::train(model, task.train, val, run_cfg);
    Rng erng(derive_seed(cell.seed, 2));
    cell.accuracy = learn::evaluate(trained.model, task.test, task.eval_noise, task.eval_realizations, erng)
                        .mean_accuracy;
  });

  for (double m : means) {
    for (double s : sigmas) {
      std::vector<double> acc;
      for (const auto& c : grid.cells) {
        if (c.mean == m && c.sigma == s) acc.push_back(c.accuracy);
      }
      const auto [mu, sd] = mean_std(acc);
      grid.summary.push_back({m, s, mu, sd});
    }
  }
  return grid;
}

std::string sweep_csv(const SweepGrid& grid) {
  std::string out = "mean_s,sigma,seed,accuracy\n";
  for (const auto& c : grid.cells) {
    out += detail::format_double(c.mean) + ',' + detail::format_double(c.sigma) + ',' +
           std::to_string(c.seed) + ',' + detail::format_double(c.accuracy) + '\n';
  }
  return out;
}

std::vector<HiddenSweepCell> sweep_hidden_size(const SrnnTask& task, std::span<const std::size_t> hidden_sizes,
                                               const learn::TrainConfig& cfg,
                                               std::span<const std::uint64_t> seeds) {
  if (hidden_sizes.empty() || seeds.empty()) throw ConfigError("sweep grids must be non-empty");
  check_task_sets(task.train, task.test);
  cfg.validate();
  const double dt = task.train.dt();
  std::vector<HiddenSweepCell> cells;
  for (auto h : hidden_sizes) {
    if (h == 0) throw ConfigError("hidden size must be >= 1");
    for (auto seed : seeds) cells.push_back({h, seed, 0.0});
  }
  const auto n_in = static_cast<Eigen::Index>(task.train.n_channels());
  const auto n_out = static_cast<Eigen::Index>(task.n_outputs);
  parallel_for(cells.size(), [&](std::size_t k) {
    auto& cell = cells[k];
    const auto h = static_cast<Eigen::Index>(cell.n_hidden);
    SrnnModel model{Eigen::MatrixXd::Zero(n_in, h), Eigen::MatrixXd::Zero(h, h),
                    Eigen::MatrixXd::Zero(h, n_out),
                    network::LifParams::from_time_constant(task.tau_hidden, dt, task.v_threshold)};
    model.alpha_out = std::exp(-dt / task.tau_out);
    Rng wrng(derive_seed(cell.seed, 1));
    learn::init_weights(model, wrng);
    auto run_cfg = cfg;
    run_cfg.seed = cell.seed;
    const auto& val = task.val.empty() ? task.test : task.val;
    const auto trained = learn::train(model, task.train, val, run_cfg);
    Rng erng(derive_seed(cell.seed, 2));
    cell.accuracy = learn::evaluate(trained.model, task.test, task.eval_noise, task.eval_realizations, erng)
                        .mean_accuracy;
  });
  return cells;
}

std::string hidden_sweep_csv(std::span<const HiddenSweepCell> cells) {
  std::string out = "n_hidden,seed,accuracy\n";
  for (const auto& c : cells) {
    out += std::to_string(c.n_hidden) + ',' + std::to_string(c.seed) + ',' +
           detail::format_double(c.accuracy) + '\n';
  }
  return out;
}

}  // namespace denram::analysis

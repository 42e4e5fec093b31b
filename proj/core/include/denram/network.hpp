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

#ifndef DENRAM_NETWORK_HPP_
#define DENRAM_NETWORK_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "denram/dendrite.hpp"

namespace denram::network {

// Discrete-time LIF with reset-to-zero:
//   v[t] = alpha * v[t-1] * (1 - s[t-1]) + I[t],  s[t] = [v[t] >= v_threshold]
struct LifParams {
  double alpha = 0.95;
  double v_threshold = 1.0;
  int refractory_bins = 0;

  // alpha = exp(-dt / tau).
  static LifParams from_time_constant(double tau_seconds, double dt, double v_threshold = 1.0);
  void validate() const;
};

enum class ReadoutMode { MaxPotential, SpikeCount };

struct LifOutput {
  Eigen::MatrixXd spikes;      // n x T, entries 0/1
  Eigen::MatrixXd potentials;  // n x T, membrane value before reset
};

LifOutput lif_forward(const Eigen::MatrixXd& currents, const LifParams& params);

// Non-spiking leaky integrator u[t] = alpha_out * u[t-1] + I[t].
Eigen::MatrixXd leaky_readout(const Eigen::MatrixXd& currents, double alpha_out);

struct DenramModel {
  dendrite::DelayBank bank;
  Eigen::MatrixXd weights;  // (n_in * n_delays) x n_out, row = expanded channel
  LifParams lif;            // output neuron, SpikeCount readout
  double alpha_out = 0.95;  // leaky integrator, MaxPotential readout
  ReadoutMode readout = ReadoutMode::MaxPotential;
  // Single-output wiring: class 1 iff the logit exceeds this value.
  double decision_threshold = 0.0;
  // Delay devices shared by all output trees (one expansion per input).
  bool shared_bank = true;
  std::uint64_t delay_seed = 0;

  std::size_t n_inputs() const { return bank.n_channels(); }
  std::size_t n_delays() const { return bank.n_delays(); }
  std::size_t n_outputs() const { return static_cast<std::size_t>(weights.cols()); }
  void validate() const;
};

struct SrnnModel {
  Eigen::MatrixXd w_in;   // n_in x n_h
  Eigen::MatrixXd w_rec;  // n_h x n_h
  Eigen::MatrixXd w_out;  // n_h x n_out
  LifParams lif_hidden;
  double alpha_out = 0.95;
  double decision_threshold = 0.0;

  std::size_t n_inputs() const { return static_cast<std::size_t>(w_in.rows()); }
  std::size_t n_hidden() const { return static_cast<std::size_t>(w_in.cols()); }
  std::size_t n_outputs() const { return static_cast<std::size_t>(w_out.cols()); }
  void validate() const;
};

struct ForwardResult {
  Eigen::VectorXd logits;
  Eigen::MatrixXd potentials;  // n_out x T (readout or output LIF)
  Eigen::MatrixXd spikes;      // output spikes (SpikeCount) or hidden spikes (SRNN)
};

ForwardResult denram_forward(const DenramModel& model, const dendrite::SpikeRaster& raster);
ForwardResult srnn_forward(const SrnnModel& model, const dendrite::SpikeRaster& raster);

// Predicted class: argmax of logits (ties -> lowest index); with a single
// output, 1 iff logit > decision_threshold.
int predict_class(const Eigen::VectorXd& logits, double decision_threshold);

// Two-branch coincidence-detection setup. Branch 0 receives IN1, branch 1
// receives IN2, which arrives `lag` seconds after IN1. Shorter branches are
// padded with zero-weight, zero-delay circuits.
struct CoincidenceSetup {
  std::vector<double> in1_delays;   // seconds
  std::vector<double> in1_weights;
  std::vector<double> in2_delays;
  std::vector<double> in2_weights;
  LifParams lif;
  double dt = 1e-3;
  double in1_time = 10e-3;   // arrival of IN1
  double tail = 50e-3;       // simulated time after the last arrival
};

struct CoincidenceResult {
  bool fired = false;
  double peak_potential = 0.0;
  std::size_t spike_count = 0;
};

CoincidenceResult coincidence_experiment(const CoincidenceSetup& setup, double lag);

// Dendritic circuits A..D on IN1 with delays {18, 36, 48, 58} ms, circuit D
// programmed to the strongest LRS level and the others to HRS; IN2 reaches the
// neuron through one undelayed LRS circuit. Weights are conductances scaled
// by a 10 kOhm reference. The neuron threshold sits midway between an
// LRS+HRS coincident pair and an LRS+LRS pair; membrane tau is 20 ms.
CoincidenceSetup default_coincidence_setup();

// Separation variant: circuit D moved to HRS, so the coincident
// pair no longer reaches threshold.
CoincidenceSetup separation_coincidence_setup();

}  // namespace denram::network

#endif  // DENRAM_NETWORK_HPP_

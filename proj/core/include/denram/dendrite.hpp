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

#ifndef DENRAM_DENDRITE_HPP_
#define DENRAM_DENDRITE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "denram/device.hpp"
#include "denram/random.hpp"

namespace denram::dendrite {

// Behavioural parameters of one dendritic delay circuit.
struct AnalogCircuitParams {
  double v_ref = 0.6;           // capacitor rest level, V
  double v_th = 0.25;           // threshold-unit level, V
  double capacitance = 1e-12;   // F
  double pulse_height = 1.2;    // V
  double pulse_width = 1e-6;    // s

  void validate() const;
};

// Closed-form delay from the end of the input pulse to the upward crossing of
// v_th: R C ln(v_ref / (v_ref - v_th)).
double analog_delay(double resistance, const AnalogCircuitParams& params);

// Inverse of analog_delay: the delay resistance that yields `delay_seconds`.
double resistance_for_delay(double delay_seconds, const AnalogCircuitParams& params);

struct RcTrace {
  double dt = 0.0;                    // spacing of recorded samples
  std::vector<double> v_cap;          // decimated capacitor voltage
  std::vector<double> output_spikes;  // seconds
};

// Forward-Euler integration of the delay circuit. The capacitor is held at
// ground while an input pulse is applied and otherwise relaxes towards v_ref
// with time constant R C. One output spike is emitted at the first upward
// v_th crossing after each pulse; a new pulse re-grounds and re-arms.
// Every `record_stride`-th sample of v_cap is kept (0 disables recording).
RcTrace simulate_rc_trace(double resistance, const AnalogCircuitParams& params,
                          std::span<const double> input_spike_times, double dt_sim,
                          double duration, std::size_t record_stride = 1);

struct SpikeEvent {
  std::uint32_t channel = 0;
  std::uint32_t step = 0;
  std::uint32_t count = 0;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

// Binned spike counts over (channel x time-step).
class SpikeRaster {
 public:
  SpikeRaster() = default;
  SpikeRaster(std::size_t n_channels, std::size_t n_steps, double dt);

  std::size_t n_channels() const { return n_channels_; }
  std::size_t n_steps() const { return n_steps_; }
  double dt() const { return dt_; }

  std::uint32_t at(std::size_t channel, std::size_t step) const {
    return counts_[channel * n_steps_ + step];
  }
  void set(std::size_t channel, std::size_t step, std::uint32_t count);
  void add(std::size_t channel, std::size_t step, std::uint32_t count = 1);

  std::span<const std::uint32_t> channel(std::size_t c) const {
    return {counts_.data() + c * n_steps_, n_steps_};
  }

  std::uint64_t total() const;
  // Non-zero bins ordered by (channel, step).
  std::vector<SpikeEvent> events() const;
  static SpikeRaster from_events(std::size_t n_channels, std::size_t n_steps, double dt,
                                 std::span<const SpikeEvent> events);

  // Dense (channel x step) copy as doubles.
  Eigen::MatrixXd to_matrix() const;

  friend bool operator==(const SpikeRaster&, const SpikeRaster&) = default;

 private:
  std::size_t n_channels_ = 0;
  std::size_t n_steps_ = 0;
  double dt_ = 1.0;
  std::vector<std::uint32_t> counts_;
};

// Fixed (never trained) delays per input channel plus their bin shifts.
class DelayBank {
 public:
  DelayBank() = default;
  // Rows are input channels, columns delay indices. Shifts use
  // round-half-to-even of delay / dt.
  DelayBank(Eigen::MatrixXd delays, double dt);

  static DelayBank sample(const device::DelayDistribution& dist, std::size_t n_channels,
                          std::size_t n_delays, double dt, Rng& rng);
  // Bank built directly from integer shifts (delays = shifts * dt).
  static DelayBank from_shifts(const Eigen::MatrixXi& shifts, double dt);

  std::size_t n_channels() const { return static_cast<std::size_t>(delays_.rows()); }
  std::size_t n_delays() const { return static_cast<std::size_t>(delays_.cols()); }
  std::size_t n_expanded() const { return n_channels() * n_delays(); }
  double dt() const { return dt_; }
  const Eigen::MatrixXd& delays() const { return delays_; }
  const Eigen::MatrixXi& shifts() const { return shifts_; }
  int shift(std::size_t channel, std::size_t delay) const {
    return shifts_(static_cast<Eigen::Index>(channel), static_cast<Eigen::Index>(delay));
  }
  int max_shift() const;

  // Expanded channel index of (input channel, delay index).
  std::size_t expanded_index(std::size_t channel, std::size_t delay) const {
    return channel * n_delays() + delay;
  }

 private:
  Eigen::MatrixXd delays_;
  Eigen::MatrixXi shifts_;
  double dt_ = 1.0;
};

// Channel (i, j) of the result is input channel i shifted right by
// shifts(i, j) bins; n_steps grows by max_shift.
SpikeRaster expand_with_delays(const SpikeRaster& raster, const DelayBank& bank);

// out(o, t) = sum_c weights(c, o) * expanded(c, t).
Eigen::MatrixXd dendritic_current(const SpikeRaster& expanded, const Eigen::MatrixXd& weights);

// Same result as dendritic_current(expand_with_delays(raster, bank), weights)
// without materialising the expanded raster. Bit-identical to the dense path.
Eigen::MatrixXd dendritic_current_events(const SpikeRaster& raster, const DelayBank& bank,
                                         const Eigen::MatrixXd& weights);

}  // namespace denram::dendrite

#endif  // DENRAM_DENDRITE_HPP_

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

#include "denram/dendrite.hpp"

#include <algorithm>
#include <cmath>

#include "denram/error.hpp"

namespace denram::dendrite {

void AnalogCircuitParams::validate() const {
  if (!(v_th > 0 && v_th < v_ref)) throw DomainError("circuit needs 0 < v_th < v_ref");
  if (!(capacitance > 0)) throw DomainError("circuit capacitance must be > 0");
  if (!(pulse_width > 0)) throw DomainError("circuit pulse_width must be > 0");
}

double analog_delay(double resistance, const AnalogCircuitParams& params) {
  params.validate();
  if (!(resistance > 0)) throw DomainError("analog_delay needs R_d > 0");
  return resistance * params.capacitance * std::log(params.v_ref / (params.v_ref - params.v_th));
}

double resistance_for_delay(double delay_seconds, const AnalogCircuitParams& params) {
  params.validate();
  if (!(delay_seconds > 0)) throw DomainError("resistance_for_delay needs delay > 0");
  return delay_seconds /
         (params.capacitance * std::log(params.v_ref / (params.v_ref - params.v_th)));
}

RcTrace simulate_rc_trace(double resistance, const AnalogCircuitParams& params,
                          std::span<const double> input_spike_times, double dt_sim,
                          double duration, std::size_t record_stride) {
  params.validate();
  if (!(resistance > 0)) throw DomainError("simulate_rc_trace needs R_d > 0");
  if (!(dt_sim > 0) || dt_sim > params.pulse_width / 10.0 * (1.0 + 1e-12)) {
    throw DomainError("simulate_rc_trace needs 0 < dt_sim <= pulse_width / 10");
  }
  if (!(duration > 0)) throw DomainError("simulate_rc_trace needs duration > 0");
  for (std::size_t k = 0; k < input_spike_times.size(); ++k) {
    const double t = input_spike_times[k];
    if (!std::isfinite(t) || t < 0 || (k > 0 && t < input_spike_times[k - 1])) {
      throw DomainError("input spike times must be finite, >= 0 and non-decreasing");
    }
  }

  const double tau = resistance * params.capacitance;
  const double rate = dt_sim / tau;
  const auto n_steps = static_cast<std::size_t>(std::ceil(duration / dt_sim));

  RcTrace trace;
  trace.dt = dt_sim * static_cast<double>(std::max<std::size_t>(record_stride, 1));
  if (record_stride > 0) trace.v_cap.reserve(n_steps / record_stride + 1);

  double v = params.v_ref;
  bool armed = false;
  double pulse_end = -1.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt_sim;
    while (next < input_spike_times.size() && input_spike_times[next] <= t) {
      pulse_end = std::max(pulse_end, input_spike_times[next] + params.pulse_width);
      ++next;
    }
    if (record_stride > 0 && k % record_stride == 0) trace.v_cap.push_back(v);
    if (t < pulse_end) {
      // The threshold unit is bypassed while IN is high.
      v = 0.0;
      armed = true;
      continue;
    }
    const double v_next = v + rate * (params.v_ref - v);
    if (armed && v < params.v_th && v_next >= params.v_th) {
      trace.output_spikes.push_back(t + dt_sim * (params.v_th - v) / (v_next - v));
      armed = false;
    }
    v = v_next;
  }
  return trace;
}

// ---- SpikeRaster ------------------------------------------------------------

SpikeRaster::SpikeRaster(std::size_t n_channels, std::size_t n_steps, double dt)
    : n_channels_(n_channels), n_steps_(n_steps), dt_(dt), counts_(n_channels * n_steps, 0) {
  if (!(dt > 0)) throw DomainError("SpikeRaster dt must be > 0");
}

void SpikeRaster::set(std::size_t channel, std::size_t step, std::uint32_t count) {
  if (channel >= n_channels_ || step >= n_steps_) throw DomainError("SpikeRaster index out of range");
  counts_[channel * n_steps_ + step] = count;
}

void SpikeRaster::add(std::size_t channel, std::size_t step, std::uint32_t count) {
  if (channel >= n_channels_ || step >= n_steps_) throw DomainError("SpikeRaster index out of range");
  counts_[channel * n_steps_ + step] += count;
}

std::uint64_t SpikeRaster::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

std::vector<SpikeEvent> SpikeRaster::events() const {
  std::vector<SpikeEvent> out;
  for (std::size_t c = 0; c < n_channels_; ++c) {
    for (std::size_t t = 0; t < n_steps_; ++t) {
      if (const auto k = counts_[c * n_steps_ + t]; k != 0) {
        out.push_back({static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(t), k});
      }
    }
  }
  return out;
}

SpikeRaster SpikeRaster::from_events(std::size_t n_channels, std::size_t n_steps, double dt,
                                     std::span<const SpikeEvent> events) {
  SpikeRaster r(n_channels, n_steps, dt);
  for (const auto& e : events) r.add(e.channel, e.step, e.count);
  return r;
}

Eigen::MatrixXd SpikeRaster::to_matrix() const {
  Eigen::MatrixXd m(n_channels_, n_steps_);
  for (std::size_t c = 0; c < n_channels_; ++c) {
    for (std::size_t t = 0; t < n_steps_; ++t) {
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = counts_[c * n_steps_ + t];
    }
  }
  return m;
}

// ---- DelayBank --------------------------------------------------------------

DelayBank::DelayBank(Eigen::MatrixXd delays, double dt) : delays_(std::move(delays)), dt_(dt) {
  if (!(dt > 0)) throw DomainError("DelayBank dt must be > 0");
  shifts_.resize(delays_.rows(), delays_.cols());
  for (Eigen::Index i = 0; i < delays_.size(); ++i) {
    const double d = delays_.data()[i];
    if (!(d >= 0) || !std::isfinite(d)) throw DomainError("delays must be finite and >= 0");
    // nearbyint under the default rounding mode: ties to even.
    shifts_.data()[i] = static_cast<int>(std::nearbyint(d / dt));
  }
}

DelayBank DelayBank::sample(const device::DelayDistribution& dist, std::size_t n_channels,
                            std::size_t n_delays, double dt, Rng& rng) {
  if (n_channels == 0 || n_delays == 0) throw ConfigError("DelayBank needs >= 1 channel and delay");
  const auto values = device::sample_delays(dist, n_channels * n_delays, rng);
  Eigen::MatrixXd delays(n_channels, n_delays);
  for (std::size_t i = 0; i < n_channels; ++i) {
    for (std::size_t j = 0; j < n_delays; ++j) {
      delays(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * n_delays + j];
    }
  }
  return DelayBank(std::move(delays), dt);
}

DelayBank DelayBank::from_shifts(const Eigen::MatrixXi& shifts, double dt) {
  if ((shifts.array() < 0).any()) throw DomainError("shifts must be >= 0");
  return DelayBank(shifts.cast<double>() * dt, dt);
}

int DelayBank::max_shift() const { return shifts_.size() == 0 ? 0 : shifts_.maxCoeff(); }

// ---- expansion and dendritic current ----------------------------------------

namespace {

void check_compatible(const SpikeRaster& raster, const DelayBank& bank) {
  if (raster.n_channels() != bank.n_channels()) {
    throw DomainError("raster has " + std::to_string(raster.n_channels()) +
                      " channels, delay bank expects " + std::to_string(bank.n_channels()));
  }
  if (std::abs(raster.dt() - bank.dt()) > 1e-12 * std::max(raster.dt(), bank.dt())) {
    throw DomainError("raster dt does not match delay bank dt");
  }
}

}  // namespace

SpikeRaster expand_with_delays(const SpikeRaster& raster, const DelayBank& bank) {
  check_compatible(raster, bank);
  const std::size_t n_steps = raster.n_steps() + static_cast<std::size_t>(bank.max_shift());
  SpikeRaster out(bank.n_expanded(), n_steps, raster.dt());
  for (std::size_t i = 0; i < bank.n_channels(); ++i) {
    const auto src = raster.channel(i);
    for (std::size_t j = 0; j < bank.n_delays(); ++j) {
      const auto shift = static_cast<std::size_t>(bank.shift(i, j));
      const std::size_t c = bank.expanded_index(i, j);
      for (std::size_t t = 0; t < src.size(); ++t) {
        if (src[t] != 0) out.set(c, t + shift, src[t]);
      }
    }
  }
  return out;
}

Eigen::MatrixXd dendritic_current(const SpikeRaster& expanded, const Eigen::MatrixXd& weights) {
  if (static_cast<std::size_t>(weights.rows()) != expanded.n_channels()) {
    throw DomainError("weight rows (" + std::to_string(weights.rows()) +
                      ") do not match expanded channels (" +
                      std::to_string(expanded.n_channels()) + ")");
  }
  const Eigen::Index n_out = weights.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_out, static_cast<Eigen::Index>(expanded.n_steps()));
  for (std::size_t c = 0; c < expanded.n_channels(); ++c) {
    const auto row = expanded.channel(c);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (row[t] == 0) continue;
      const double k = row[t];
      for (Eigen::Index o = 0; o < n_out; ++o) {
        out(o, static_cast<Eigen::Index>(t)) += weights(static_cast<Eigen::Index>(c), o) * k;
      }
    }
  }
  return out;
}

Eigen::MatrixXd dendritic_current_events(const SpikeRaster& raster, const DelayBank& bank,
                                         const Eigen::MatrixXd& weights) {
  check_compatible(raster, bank);
  if (static_cast<std::size_t>(weights.rows()) != bank.n_expanded()) {
    throw DomainError("weight rows do not match n_in * n_delays");
  }
  const auto events = raster.events();
  const Eigen::Index n_out = weights.cols();
  const auto n_steps = static_cast<Eigen::Index>(raster.n_steps()) + bank.max_shift();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_out, n_steps);
  // events() is ordered by channel, so each channel's events form one run.
  std::size_t begin = 0;
  while (begin < events.size()) {
    const std::size_t i = events[begin].channel;
    std::size_t end = begin;
    while (end < events.size() && events[end].channel == i) ++end;
    for (std::size_t j = 0; j < bank.n_delays(); ++j) {
      const auto c = static_cast<Eigen::Index>(bank.expanded_index(i, j));
      const int shift = bank.shift(i, j);
      for (std::size_t e = begin; e < end; ++e) {
        const double k = events[e].count;
        const Eigen::Index t = static_cast<Eigen::Index>(events[e].step) + shift;
        for (Eigen::Index o = 0; o < n_out; ++o) out(o, t) += weights(c, o) * k;
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace denram::dendrite

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

#include "denram/network.hpp"

#include <algorithm>
#include <cmath>

#include "denram/device.hpp"
#include "denram/error.hpp"

namespace denram::network {

using dendrite::DelayBank;
using dendrite::SpikeRaster;

LifParams LifParams::from_time_constant(double tau_seconds, double dt, double v_threshold) {
  if (!(tau_seconds > 0) || !(dt > 0)) throw ConfigError("time constant and dt must be > 0");
  LifParams p;
  p.alpha = std::exp(-dt / tau_seconds);
  p.v_threshold = v_threshold;
  p.validate();
  return p;
}

void LifParams::validate() const {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("LIF alpha must be in (0, 1)");
  if (!(v_threshold > 0)) throw ConfigError("LIF v_threshold must be > 0");
  if (refractory_bins < 0) throw ConfigError("LIF refractory_bins must be >= 0");
}

LifOutput lif_forward(const Eigen::MatrixXd& currents, const LifParams& params) {
  params.validate();
  LifOutput out;
  out.spikes = Eigen::MatrixXd::Zero(currents.rows(), currents.cols());
  out.potentials = Eigen::MatrixXd::Zero(currents.rows(), currents.cols());
  for (Eigen::Index n = 0; n < currents.rows(); ++n) {
    double v = 0.0;
    double s = 0.0;
    int refractory = 0;
    for (Eigen::Index t = 0; t < currents.cols(); ++t) {
      v = params.alpha * v * (1.0 - s) + currents(n, t);
      const bool can_fire = refractory == 0;
      if (refractory > 0) --refractory;
      s = (can_fire && v >= params.v_threshold) ? 1.0 : 0.0;
      if (s != 0.0) refractory = params.refractory_bins;
      out.potentials(n, t) = v;
      out.spikes(n, t) = s;
    }
  }
  return out;
}

Eigen::MatrixXd leaky_readout(const Eigen::MatrixXd& currents, double alpha_out) {
  if (!(alpha_out >= 0 && alpha_out < 1)) throw ConfigError("alpha_out must be in [0, 1)");
  Eigen::MatrixXd u(currents.rows(), currents.cols());
  for (Eigen::Index n = 0; n < currents.rows(); ++n) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < currents.cols(); ++t) {
      acc = alpha_out * acc + currents(n, t);
      u(n, t) = acc;
    }
  }
  return u;
}

void DenramModel::validate() const {
  if (static_cast<std::size_t>(weights.rows()) != bank.n_expanded()) {
    throw ConfigError("DenRAM weight rows (" + std::to_string(weights.rows()) +
                      ") must equal n_in * n_delays (" + std::to_string(bank.n_expanded()) + ")");
  }
  if (weights.cols() < 1) throw ConfigError("DenRAM model needs at least one output");
  lif.validate();
  if (!(alpha_out >= 0 && alpha_out < 1)) throw ConfigError("alpha_out must be in [0, 1)");
}

void SrnnModel::validate() const {
  if (w_rec.rows() != w_rec.cols() || w_rec.rows() != w_in.cols()) {
    throw ConfigError("SRNN recurrent matrix must be n_h x n_h with n_h = w_in columns");
  }
  if (w_out.rows() != w_in.cols()) throw ConfigError("SRNN w_out rows must equal n_h");
  if (w_out.cols() < 1) throw ConfigError("SRNN needs at least one output");
  lif_hidden.validate();
  if (!(alpha_out >= 0 && alpha_out < 1)) throw ConfigError("alpha_out must be in [0, 1)");
}

namespace {

Eigen::VectorXd max_over_time(const Eigen::MatrixXd& u) {
  Eigen::VectorXd out(u.rows());
  for (Eigen::Index o = 0; o < u.rows(); ++o) out(o) = u.cols() == 0 ? 0.0 : u.row(o).maxCoeff();
  return out;
}

}  // namespace

ForwardResult denram_forward(const DenramModel& model, const SpikeRaster& raster) {
  model.validate();
  const Eigen::MatrixXd currents =
      dendrite::dendritic_current_events(raster, model.bank, model.weights);
  ForwardResult r;
  if (model.readout == ReadoutMode::MaxPotential) {
    r.potentials = leaky_readout(currents, model.alpha_out);
    r.logits = max_over_time(r.potentials);
  } else {
    auto lif = lif_forward(currents, model.lif);
    r.logits = lif.spikes.rowwise().sum();
    r.potentials = std::move(lif.potentials);
    r.spikes = std::move(lif.spikes);
  }
  return r;
}

ForwardResult srnn_forward(const SrnnModel& model, const SpikeRaster& raster) {
  model.validate();
  if (raster.n_channels() != model.n_inputs()) {
    throw DomainError("raster has " + std::to_string(raster.n_channels()) +
                      " channels, SRNN expects " + std::to_string(model.n_inputs()));
  }
  const auto n_h = static_cast<Eigen::Index>(model.n_hidden());
  const auto n_out = static_cast<Eigen::Index>(model.n_outputs());
  const auto n_steps = static_cast<Eigen::Index>(raster.n_steps());
  const auto& p = model.lif_hidden;

  ForwardResult r;
  r.spikes = Eigen::MatrixXd::Zero(n_h, n_steps);
  r.potentials = Eigen::MatrixXd::Zero(n_out, n_steps);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_h);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_h);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_out);
  Eigen::VectorXi refractory = Eigen::VectorXi::Zero(n_h);
  const auto events = raster.events();
  // Events per step, for the sparse input projection.
  std::vector<std::vector<std::pair<Eigen::Index, double>>> by_step(raster.n_steps());
  for (const auto& e : events) by_step[e.step].emplace_back(e.channel, e.count);

  for (Eigen::Index t = 0; t < n_steps; ++t) {
    Eigen::VectorXd current = model.w_rec.transpose() * s;
    for (const auto& [c, k] : by_step[static_cast<std::size_t>(t)]) {
      current += model.w_in.row(c).transpose() * k;
    }
    for (Eigen::Index h = 0; h < n_h; ++h) {
      v(h) = p.alpha * v(h) * (1.0 - s(h)) + current(h);
      const bool can_fire = refractory(h) == 0;
      if (refractory(h) > 0) --refractory(h);
      s(h) = (can_fire && v(h) >= p.v_threshold) ? 1.0 : 0.0;
      if (s(h) != 0.0) refractory(h) = p.refractory_bins;
    }
    r.spikes.col(t) = s;
    u = model.alpha_out * u + model.w_out.transpose() * s;
    r.potentials.col(t) = u;
  }
  r.logits = max_over_time(r.potentials);
  return r;
}

int predict_class(const Eigen::VectorXd& logits, double decision_threshold) {
  if (logits.size() == 0) throw DomainError("empty logits");
  if (logits.size() == 1) return logits(0) > decision_threshold ? 1 : 0;
  Eigen::Index best = 0;
  for (Eigen::Index o = 1; o < logits.size(); ++o) {
    if (logits(o) > logits(best)) best = o;
  }
  return static_cast<int>(best);
}

CoincidenceResult coincidence_experiment(const CoincidenceSetup& setup, double lag) {
  if (setup.in1_delays.size() != setup.in1_weights.size() ||
      setup.in2_delays.size() != setup.in2_weights.size()) {
    throw ConfigError("coincidence setup needs one weight per dendritic circuit");
  }
  if (setup.in1_delays.empty() && setup.in2_delays.empty()) {
    throw ConfigError("coincidence setup has no dendritic circuits");
  }
  if (!(setup.dt > 0) || !(lag >= 0) || !(setup.in1_time >= 0)) {
    throw DomainError("coincidence experiment needs dt > 0, lag >= 0, in1_time >= 0");
  }
  const std::size_t n_delays = std::max(setup.in1_delays.size(), setup.in2_delays.size());
  Eigen::MatrixXd delays = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(n_delays));
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n_delays), 1);
  for (std::size_t j = 0; j < setup.in1_delays.size(); ++j) {
    delays(0, static_cast<Eigen::Index>(j)) = setup.in1_delays[j];
    weights(static_cast<Eigen::Index>(j), 0) = setup.in1_weights[j];
  }
  for (std::size_t j = 0; j < setup.in2_delays.size(); ++j) {
    delays(1, static_cast<Eigen::Index>(j)) = setup.in2_delays[j];
    weights(static_cast<Eigen::Index>(n_delays + j), 0) = setup.in2_weights[j];
  }

  DenramModel model;
  model.bank = DelayBank(std::move(delays), setup.dt);
  model.weights = std::move(weights);
  model.lif = setup.lif;
  model.readout = ReadoutMode::SpikeCount;

  const auto in1_bin = static_cast<std::size_t>(std::nearbyint(setup.in1_time / setup.dt));
  const auto in2_bin = static_cast<std::size_t>(std::nearbyint((setup.in1_time + lag) / setup.dt));
  const auto tail_bins = static_cast<std::size_t>(std::ceil(setup.tail / setup.dt));
  SpikeRaster raster(2, std::max(in1_bin, in2_bin) + 1 + tail_bins, setup.dt);
  raster.add(0, in1_bin);
  raster.add(1, in2_bin);

  const auto fwd = denram_forward(model, raster);
  CoincidenceResult out;
  out.spike_count = static_cast<std::size_t>(fwd.logits(0));
  out.fired = out.spike_count > 0;
  out.peak_potential = fwd.potentials.maxCoeff();
  return out;
}

namespace {

constexpr double kReferenceResistance = 10e3;  // ohms; weight 1.0

double lrs_weight() { return kReferenceResistance / device::nominal_set_resistance(7); }
double hrs_weight() { return kReferenceResistance / device::nominal_reset_resistance(); }

}  // namespace

CoincidenceSetup default_coincidence_setup() {
  const double w_lrs = lrs_weight();
  const double w_hrs = hrs_weight();
  CoincidenceSetup s;
  s.in1_delays = {18e-3, 36e-3, 48e-3, 58e-3};
  s.in1_weights = {w_hrs, w_hrs, w_hrs, w_lrs};
  s.in2_delays = {0.0};
  s.in2_weights = {w_lrs};
  s.dt = 1e-3;
  s.lif = LifParams::from_time_constant(20e-3, s.dt, 0.5 * ((w_lrs + w_hrs) + 2.0 * w_lrs));
  return s;
}

CoincidenceSetup separation_coincidence_setup() {
  CoincidenceSetup s = default_coincidence_setup();
  s.in1_weights.back() = hrs_weight();
  return s;
}

}  // namespace denram::network

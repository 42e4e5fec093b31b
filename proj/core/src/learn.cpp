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

#include "denram/learn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "denram/error.hpp"
#include "denram/parallel.hpp"
#include "text_util.hpp"

namespace denram::learn {

using data::LabeledRaster;
using data::LabeledRasterSet;
using network::DenramModel;
using network::SrnnModel;

double surrogate_derivative(double v, double threshold, const Surrogate& kind) {
  const double x = v - threshold;
  if (const auto* fs = std::get_if<FastSigmoid>(&kind)) {
    const double d = 1.0 + fs->slope * std::abs(x);
    return 1.0 / (d * d);
  }
  const auto& box = std::get<Boxcar>(kind);
  return std::abs(x) <= 0.5 * box.width ? 1.0 / box.width : 0.0;
}

double relaxed_spike(double v, double threshold, const Surrogate& kind) {
  const double x = v - threshold;
  if (const auto* fs = std::get_if<FastSigmoid>(&kind)) {
    return x / (1.0 + fs->slope * std::abs(x));
  }
  const auto& box = std::get<Boxcar>(kind);
  return std::clamp(x / box.width, -0.5, 0.5) + 0.5;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  noise.validate();
  if (const auto* fs = std::get_if<FastSigmoid>(&surrogate); fs && !(fs->slope > 0)) {
    throw ConfigError("fast-sigmoid slope must be > 0");
  }
  if (const auto* box = std::get_if<Boxcar>(&surrogate); box && !(box->width > 0)) {
    throw ConfigError("boxcar width must be > 0");
  }
  if (const auto* am = std::get_if<AdaptiveMoments>(&optimizer)) {
    if (!(am->beta1 >= 0 && am->beta1 < 1 && am->beta2 >= 0 && am->beta2 < 1 && am->epsilon > 0)) {
      throw ConfigError("adaptive-moments needs beta1, beta2 in [0, 1) and epsilon > 0");
    }
  }
  if (val_noise_realizations < 1) throw ConfigError("val_noise_realizations must be >= 1");
}

std::string history_csv(const TrainHistory& history) {
  std::string out = "epoch,loss,train_acc,val_acc,seed\n";
  for (const auto& e : history.epochs) {
    out += std::to_string(e.epoch) + ',' + detail::format_double(e.train_loss) + ',' +
           detail::format_double(e.train_accuracy) + ',' +
           detail::format_double(e.val_accuracy) + ',' + std::to_string(e.noise_seed) + '\n';
  }
  return out;
}

std::vector<Eigen::MatrixXd*> trainable_parameters(DenramModel& model) { return {&model.weights}; }

std::vector<Eigen::MatrixXd*> trainable_parameters(SrnnModel& model) {
  return {&model.w_in, &model.w_rec, &model.w_out};
}

namespace {

using BatchView = std::span<const LabeledRaster* const>;

// Samples per gradient chunk. Chunks are reduced in index order, so results do
// not depend on the worker count.
constexpr std::size_t kChunk = 8;

// Logits fed to the softmax. A single output is compared against the decision
// threshold, i.e. the class-0 logit is the constant threshold.
Eigen::VectorXd loss_logits(const Eigen::VectorXd& z, double decision_threshold) {
  if (z.size() != 1) return z;
  Eigen::VectorXd out(2);
  out << decision_threshold, z(0);
  return out;
}

void check_label(int label, Eigen::Index n_logits) {
  const Eigen::Index n_classes = std::max<Eigen::Index>(n_logits, 2);
  if (label < 0 || label >= n_classes) {
    throw DomainError("label " + std::to_string(label) + " out of range for " +
                      std::to_string(n_classes) + " classes");
  }
}

// Cross-entropy and d loss / d logits (before the single-output mapping).
double cross_entropy(const Eigen::VectorXd& z, double decision_threshold, int label,
                     Eigen::VectorXd* grad_z) {
  check_label(label, z.size());
  const Eigen::VectorXd logits = loss_logits(z, decision_threshold);
  const double m = logits.maxCoeff();
  const Eigen::VectorXd e = (logits.array() - m).exp().matrix();
  const double sum = e.sum();
  const double loss = -(logits(label) - m - std::log(sum));
  if (grad_z != nullptr) {
    Eigen::VectorXd p = e / sum;
    p(label) -= 1.0;
    if (z.size() == 1) {
      *grad_z = Eigen::VectorXd::Constant(1, p(1));
    } else {
      *grad_z = p;
    }
  }
  return loss;
}

// First index of the maximum (ties -> earliest bin).
Eigen::Index first_argmax(const Eigen::MatrixXd& u, Eigen::Index row) {
  Eigen::Index best = 0;
  for (Eigen::Index t = 1; t < u.cols(); ++t) {
    if (u(row, t) > u(row, best)) best = t;
  }
  return best;
}

std::vector<double> powers(double base, std::size_t n) {
  std::vector<double> out(n + 1);
  out[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) out[k] = out[k - 1] * base;
  return out;
}

struct SampleOutcome {
  double loss = 0.0;
  bool correct = false;
};

// ---- DenRAM ---------------------------------------------------------------------

SampleOutcome denram_sample(const DenramModel& m, const LabeledRaster& sample,
                            Eigen::MatrixXd* grad) {
  const auto& raster = sample.raster;
  const auto& bank = m.bank;
  const Eigen::MatrixXd currents = dendrite::dendritic_current_events(raster, bank, m.weights);
  const Eigen::MatrixXd u = network::leaky_readout(currents, m.alpha_out);
  const Eigen::Index n_out = u.rows();
  Eigen::VectorXd z(n_out);
  std::vector<Eigen::Index> t_star(static_cast<std::size_t>(n_out));
  for (Eigen::Index o = 0; o < n_out; ++o) {
    t_star[static_cast<std::size_t>(o)] = first_argmax(u, o);
    z(o) = u(o, t_star[static_cast<std::size_t>(o)]);
  }
  Eigen::VectorXd g_z;
  SampleOutcome out;
  out.loss = cross_entropy(z, m.decision_threshold, sample.label, grad ? &g_z : nullptr);
  out.correct = network::predict_class(z, m.decision_threshold) == sample.label;
  if (grad == nullptr) return out;

  // d z_o / d I_o[t] = alpha^(t*_o - t) for t <= t*_o.
  const auto alpha_pow = powers(m.alpha_out, static_cast<std::size_t>(u.cols()));
  for (const auto& e : raster.events()) {
    for (std::size_t j = 0; j < bank.n_delays(); ++j) {
      const auto c = static_cast<Eigen::Index>(bank.expanded_index(e.channel, j));
      const Eigen::Index t = static_cast<Eigen::Index>(e.step) + bank.shift(e.channel, j);
      for (Eigen::Index o = 0; o < n_out; ++o) {
        const Eigen::Index ts = t_star[static_cast<std::size_t>(o)];
        if (t > ts) continue;
        (*grad)(c, o) += e.count * alpha_pow[static_cast<std::size_t>(ts - t)] * g_z(o);
      }
    }
  }
  return out;
}

// ---- SRNN -----------------------------------------------------------------------

struct SrnnTape {
  Eigen::MatrixXd v;     // n_h x T, before reset
  Eigen::MatrixXd s;     // n_h x T
  Eigen::MatrixXd dphi;  // n_h x T, d s / d v
  Eigen::MatrixXd u;     // n_out x T
};

std::vector<std::vector<std::pair<Eigen::Index, double>>> events_by_step(
    const dendrite::SpikeRaster& raster) {
  std::vector<std::vector<std::pair<Eigen::Index, double>>> by_step(raster.n_steps());
  for (const auto& e : raster.events()) by_step[e.step].emplace_back(e.channel, e.count);
  return by_step;
}

SrnnTape srnn_tape(const SrnnModel& m,
                   const std::vector<std::vector<std::pair<Eigen::Index, double>>>& by_step,
                   const Surrogate& surrogate, SpikeFunction spike_fn) {
  const auto n_h = static_cast<Eigen::Index>(m.n_hidden());
  const auto n_out = static_cast<Eigen::Index>(m.n_outputs());
  const auto n_steps = static_cast<Eigen::Index>(by_step.size());
  const auto& p = m.lif_hidden;
  SrnnTape tape;
  tape.v.resize(n_h, n_steps);
  tape.s.resize(n_h, n_steps);
  tape.dphi.resize(n_h, n_steps);
  tape.u.resize(n_out, n_steps);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_h);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_h);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_out);
  Eigen::VectorXi refractory = Eigen::VectorXi::Zero(n_h);
  for (Eigen::Index t = 0; t < n_steps; ++t) {
    Eigen::VectorXd current = m.w_rec.transpose() * s;
    for (const auto& [c, k] : by_step[static_cast<std::size_t>(t)]) {
      current += m.w_in.row(c).transpose() * k;
    }
    for (Eigen::Index h = 0; h < n_h; ++h) {
      v(h) = p.alpha * v(h) * (1.0 - s(h)) + current(h);
      if (spike_fn == SpikeFunction::Relaxed) {
        s(h) = relaxed_spike(v(h), p.v_threshold, surrogate);
        tape.dphi(h, t) = surrogate_derivative(v(h), p.v_threshold, surrogate);
      } else {
        const bool can_fire = refractory(h) == 0;
        if (refractory(h) > 0) --refractory(h);
        s(h) = (can_fire && v(h) >= p.v_threshold) ? 1.0 : 0.0;
        if (s(h) != 0.0) refractory(h) = p.refractory_bins;
        tape.dphi(h, t) = can_fire ? surrogate_derivative(v(h), p.v_threshold, surrogate) : 0.0;
      }
    }
    tape.v.col(t) = v;
    tape.s.col(t) = s;
    u = m.alpha_out * u + m.w_out.transpose() * s;
    tape.u.col(t) = u;
  }
  return tape;
}

struct SrnnGrads {
  Eigen::MatrixXd w_in, w_rec, w_out;
};

SampleOutcome srnn_sample(const SrnnModel& m, const LabeledRaster& sample, SrnnGrads* grad,
                          const Surrogate& surrogate, SpikeFunction spike_fn) {
  if (sample.raster.n_channels() != m.n_inputs()) {
    throw DomainError("raster has " + std::to_string(sample.raster.n_channels()) +
                      " channels, SRNN expects " + std::to_string(m.n_inputs()));
  }
  const auto by_step = events_by_step(sample.raster);
  const SrnnTape tape = srnn_tape(m, by_step, surrogate, spike_fn);
  const Eigen::Index n_out = tape.u.rows();
  const Eigen::Index n_steps = tape.u.cols();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n_out);
  std::vector<Eigen::Index> t_star(static_cast<std::size_t>(n_out), 0);
  if (n_steps > 0) {
    for (Eigen::Index o = 0; o < n_out; ++o) {
      t_star[static_cast<std::size_t>(o)] = first_argmax(tape.u, o);
      z(o) = tape.u(o, t_star[static_cast<std::size_t>(o)]);
    }
  }
  Eigen::VectorXd g_z;
  SampleOutcome out;
  out.loss = cross_entropy(z, m.decision_threshold, sample.label, grad ? &g_z : nullptr);
  out.correct = network::predict_class(z, m.decision_threshold) == sample.label;
  if (grad == nullptr || n_steps == 0) return out;

  const double alpha = m.lif_hidden.alpha;
  const auto n_h = static_cast<Eigen::Index>(m.n_hidden());
  Eigen::VectorXd g_current_out = Eigen::VectorXd::Zero(n_out);  // d L / d I_out[t]
  Eigen::VectorXd g_v_next = Eigen::VectorXd::Zero(n_h);          // d L / d v[t+1]
  for (Eigen::Index t = n_steps - 1; t >= 0; --t) {
    g_current_out *= m.alpha_out;
    for (Eigen::Index o = 0; o < n_out; ++o) {
      if (t_star[static_cast<std::size_t>(o)] == t) g_current_out(o) += g_z(o);
    }
    const auto s_t = tape.s.col(t);
    const auto v_t = tape.v.col(t);
    grad->w_out.noalias() += s_t * g_current_out.transpose();

    Eigen::VectorXd g_s = m.w_out * g_current_out;
    if (t + 1 < n_steps) {
      g_s.noalias() += m.w_rec * g_v_next;
      g_s.array() -= alpha * v_t.array() * g_v_next.array();
    }
    Eigen::VectorXd g_v = g_s.cwiseProduct(tape.dphi.col(t));
    if (t + 1 < n_steps) {
      g_v.array() += alpha * (1.0 - s_t.array()) * g_v_next.array();
    }
    for (const auto& [c, k] : by_step[static_cast<std::size_t>(t)]) {
      grad->w_in.row(c) += k * g_v.transpose();
    }
    if (t > 0) grad->w_rec.noalias() += tape.s.col(t - 1) * g_v.transpose();
    g_v_next = std::move(g_v);
  }
  return out;
}

// ---- batching -----------------------------------------------------------------------

template <class PerSample>
LossGrad reduce_batch(BatchView batch, const std::vector<Eigen::MatrixXd>& zero_grads,
                      PerSample&& per_sample) {
  if (batch.empty()) throw DomainError("batch must be non-empty");
  const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<LossGrad> partial(n_chunks);
  parallel_for(n_chunks, [&](std::size_t chunk) {
    LossGrad& acc = partial[chunk];
    acc.grads = zero_grads;
    const std::size_t end = std::min(batch.size(), (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i) {
      const SampleOutcome r = per_sample(*batch[i], acc.grads);
      acc.loss += r.loss;
      acc.correct += r.correct ? 1 : 0;
    }
  });
  LossGrad total;
  total.grads = zero_grads;
  for (const auto& p : partial) {
    total.loss += p.loss;
    total.correct += p.correct;
    for (std::size_t k = 0; k < total.grads.size(); ++k) total.grads[k] += p.grads[k];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  total.loss *= inv;
  for (auto& g : total.grads) g *= inv;
  return total;
}

LossGrad denram_loss_grad(const DenramModel& model, BatchView batch,
                          const device::NoiseModel* noise, Rng& rng) {
  model.validate();
  const DenramModel noisy = noise != nullptr ? perturbed(model, *noise, rng) : model;
  const std::vector<Eigen::MatrixXd> zero{Eigen::MatrixXd::Zero(model.weights.rows(), model.weights.cols())};
  return reduce_batch(batch, zero, [&](const LabeledRaster& s, std::vector<Eigen::MatrixXd>& g) {
    return denram_sample(noisy, s, &g[0]);
  });
}

LossGrad srnn_loss_grad(const SrnnModel& model, BatchView batch, const device::NoiseModel* noise,
                        Rng& rng, const Surrogate& surrogate, SpikeFunction spike_fn) {
  model.validate();
  const SrnnModel noisy = noise != nullptr ? perturbed(model, *noise, rng) : model;
  const std::vector<Eigen::MatrixXd> zero{
      Eigen::MatrixXd::Zero(model.w_in.rows(), model.w_in.cols()),
      Eigen::MatrixXd::Zero(model.w_rec.rows(), model.w_rec.cols()),
      Eigen::MatrixXd::Zero(model.w_out.rows(), model.w_out.cols())};
  return reduce_batch(batch, zero, [&](const LabeledRaster& s, std::vector<Eigen::MatrixXd>& g) {
    SrnnGrads sg{std::move(g[0]), std::move(g[1]), std::move(g[2])};
    const auto r = srnn_sample(noisy, s, &sg, surrogate, spike_fn);
    g[0] = std::move(sg.w_in);
    g[1] = std::move(sg.w_rec);
    g[2] = std::move(sg.w_out);
    return r;
  });
}

std::vector<const LabeledRaster*> pointers(std::span<const LabeledRaster> batch) {
  std::vector<const LabeledRaster*> out;
  out.reserve(batch.size());
  for (const auto& s : batch) out.push_back(&s);
  return out;
}

}  // namespace

LossGrad loss_and_grads(const DenramModel& model, std::span<const LabeledRaster> batch,
                        const device::NoiseModel* noise, Rng& rng) {
  const auto ptrs = pointers(batch);
  return denram_loss_grad(model, ptrs, noise, rng);
}

LossGrad loss_and_grads(const SrnnModel& model, std::span<const LabeledRaster> batch,
                        const device::NoiseModel* noise, Rng& rng, const Surrogate& surrogate,
                        SpikeFunction spike_fn) {
  const auto ptrs = pointers(batch);
  return srnn_loss_grad(model, ptrs, noise, rng, surrogate, spike_fn);
}

double batch_loss(const DenramModel& model, std::span<const LabeledRaster> batch) {
  model.validate();
  if (batch.empty()) throw DomainError("batch must be non-empty");
  double sum = 0.0;
  for (const auto& s : batch) sum += denram_sample(model, s, nullptr).loss;
  return sum / static_cast<double>(batch.size());
}

double batch_loss(const SrnnModel& model, std::span<const LabeledRaster> batch,
                  const Surrogate& surrogate, SpikeFunction spike_fn) {
  model.validate();
  if (batch.empty()) throw DomainError("batch must be non-empty");
  double sum = 0.0;
  for (const auto& s : batch) sum += srnn_sample(model, s, nullptr, surrogate, spike_fn).loss;
  return sum / static_cast<double>(batch.size());
}

DenramModel perturbed(const DenramModel& model, const device::NoiseModel& noise, Rng& rng) {
  DenramModel out = model;
  out.weights = device::apply_read_noise(model.weights, noise, rng);
  return out;
}

SrnnModel perturbed(const SrnnModel& model, const device::NoiseModel& noise, Rng& rng) {
  SrnnModel out = model;
  out.w_in = device::apply_read_noise(model.w_in, noise, rng);
  out.w_rec = device::apply_read_noise(model.w_rec, noise, rng);
  out.w_out = device::apply_read_noise(model.w_out, noise, rng);
  return out;
}

// ---- evaluation -------------------------------------------------------------------

namespace {

std::vector<int> predictions(const DenramModel& m, const LabeledRasterSet& set) {
  std::vector<int> out(set.size());
  parallel_for(set.size(), [&](std::size_t i) {
    const auto fwd = network::denram_forward(m, set.samples[i].raster);
    out[i] = network::predict_class(fwd.logits, m.decision_threshold);
  });
  return out;
}

std::vector<int> predictions(const SrnnModel& m, const LabeledRasterSet& set) {
  std::vector<int> out(set.size());
  parallel_for(set.size(), [&](std::size_t i) {
    const auto fwd = network::srnn_forward(m, set.samples[i].raster);
    out[i] = network::predict_class(fwd.logits, m.decision_threshold);
  });
  return out;
}

template <class Model>
EvalResult evaluate_impl(const Model& model, const LabeledRasterSet& set,
                         const device::NoiseModel& noise, std::size_t n_realizations, Rng& rng) {
  noise.validate();
  if (n_realizations < 1) throw ConfigError("evaluate needs n_realizations >= 1");
  const std::size_t runs = noise.relative_std == 0.0 ? 1 : n_realizations;
  const auto n_classes = static_cast<std::size_t>(std::max(set.n_classes, 1));
  const auto counts = set.class_counts();
  std::vector<double> class_correct(n_classes, 0.0);
  EvalResult r;
  for (std::size_t k = 0; k < runs; ++k) {
    const Model m = noise.relative_std == 0.0 ? model : perturbed(model, noise, rng);
    const auto pred = predictions(m, set);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (pred[i] == set.samples[i].label) {
        ++correct;
        class_correct[static_cast<std::size_t>(set.samples[i].label)] += 1.0;
      }
    }
    r.realization_accuracy.push_back(
        set.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(set.size()));
  }
  const double n = static_cast<double>(runs);
  r.mean_accuracy = std::accumulate(r.realization_accuracy.begin(), r.realization_accuracy.end(), 0.0) / n;
  if (runs > 1) {
    double ss = 0.0;
    for (double a : r.realization_accuracy) ss += (a - r.mean_accuracy) * (a - r.mean_accuracy);
    r.std_accuracy = std::sqrt(ss / (n - 1.0));
  }
  r.per_class_accuracy.resize(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (c < counts.size() && counts[c] > 0) {
      r.per_class_accuracy[c] = class_correct[c] / (n * static_cast<double>(counts[c]));
    }
  }
  return r;
}

}  // namespace

EvalResult evaluate(const DenramModel& model, const LabeledRasterSet& test_set,
                    const device::NoiseModel& noise, std::size_t n_realizations, Rng& rng) {
  return evaluate_impl(model, test_set, noise, n_realizations, rng);
}

EvalResult evaluate(const SrnnModel& model, const LabeledRasterSet& test_set,
                    const device::NoiseModel& noise, std::size_t n_realizations, Rng& rng) {
  return evaluate_impl(model, test_set, noise, n_realizations, rng);
}

// ---- initialisation -----------------------------------------------------------------

namespace {

void fill_uniform(Eigen::MatrixXd& m, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
}

}  // namespace

void init_weights(DenramModel& model, Rng& rng) {
  model.weights.resize(static_cast<Eigen::Index>(model.bank.n_expanded()), model.weights.cols());
  fill_uniform(model.weights, model.bank.n_expanded(), rng);
}

void init_weights(SrnnModel& model, Rng& rng) {
  fill_uniform(model.w_in, model.n_inputs(), rng);
  fill_uniform(model.w_rec, model.n_hidden(), rng);
  fill_uniform(model.w_out, model.n_hidden(), rng);
}

// ---- training -------------------------------------------------------------------------

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, const std::vector<Eigen::MatrixXd*>& params)
      : kind_(cfg.optimizer), lr_(cfg.learning_rate) {
    for (const auto* p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }

  void step(const std::vector<Eigen::MatrixXd*>& params, const std::vector<Eigen::MatrixXd>& grads) {
    ++t_;
    if (std::holds_alternative<Sgd>(kind_)) {
      for (std::size_t k = 0; k < params.size(); ++k) *params[k] -= lr_ * grads[k];
      return;
    }
    const auto& am = std::get<AdaptiveMoments>(kind_);
    const double c1 = 1.0 - std::pow(am.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(am.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = am.beta1 * m_[k] + (1.0 - am.beta1) * grads[k];
      v_[k] = am.beta2 * v_[k] + (1.0 - am.beta2) * grads[k].cwiseProduct(grads[k]);
      params[k]->array() -=
          lr_ * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + am.epsilon);
    }
  }

 private:
  OptimizerKind kind_;
  double lr_;
  std::vector<Eigen::MatrixXd> m_, v_;
  std::size_t t_ = 0;
};

LossGrad batch_step(const DenramModel& m, BatchView batch, const device::NoiseModel* noise, Rng& rng,
                    const TrainConfig&) {
  return denram_loss_grad(m, batch, noise, rng);
}

LossGrad batch_step(const SrnnModel& m, BatchView batch, const device::NoiseModel* noise, Rng& rng,
                    const TrainConfig& cfg) {
  return srnn_loss_grad(m, batch, noise, rng, cfg.surrogate, SpikeFunction::Heaviside);
}

double set_loss(const DenramModel& m, const LabeledRasterSet& set, const TrainConfig&) {
  return batch_loss(m, set.samples);
}

double set_loss(const SrnnModel& m, const LabeledRasterSet& set, const TrainConfig& cfg) {
  return batch_loss(m, set.samples, cfg.surrogate);
}

template <class Model>
TrainResult<Model> train_impl(const Model& initial, const LabeledRasterSet& train_set,
                              const LabeledRasterSet& val_set, const TrainConfig& cfg) {
  cfg.validate();
  initial.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  train_set.validate();
  if (!val_set.empty()) val_set.validate();

  TrainResult<Model> result{initial, {}};
  const std::size_t total_epochs = cfg.epochs_pretrain + cfg.epochs_noise_aware;
  if (total_epochs == 0) return result;

  Model model = initial;
  auto params = trainable_parameters(model);
  Optimizer opt(cfg, params);
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < total_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const bool noise_aware = epoch >= cfg.epochs_pretrain;
    if (noise_aware && epoch == cfg.epochs_pretrain) {
      // Checkpoint selection restarts with the noise-aware phase.
      best_acc = -1.0;
      best_loss = std::numeric_limits<double>::infinity();
    }
    const std::uint64_t noise_seed = derive_seed(cfg.seed ^ cfg.noise.seed, 1000 + epoch);
    Rng noise_rng(noise_seed);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<const LabeledRaster*> batch;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set.samples[order[i]]);
      const LossGrad lg =
          batch_step(model, batch, noise_aware ? &cfg.noise : nullptr, noise_rng, cfg);
      opt.step(params, lg.grads);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      correct += lg.correct;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.noise_aware = noise_aware;
    rec.noise_seed = noise_seed;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    if (!val_set.empty()) {
      Rng val_rng(derive_seed(noise_seed, 7));
      const device::NoiseModel val_noise{noise_aware ? cfg.noise.relative_std : 0.0, 0};
      rec.val_accuracy =
          evaluate(model, val_set, val_noise, cfg.val_noise_realizations, val_rng).mean_accuracy;
      rec.val_loss = set_loss(model, val_set, cfg);
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const bool better = val_set.empty() || rec.val_accuracy > best_acc ||
                        (rec.val_accuracy == best_acc && rec.val_loss < best_loss);
    if (better) {
      best_acc = rec.val_accuracy;
      best_loss = rec.val_loss;
      result.model = model;
      result.history.best_epoch = result.history.epochs.size();
    }
    result.history.epochs.push_back(rec);
  }
  return result;
}

}  // namespace

TrainResult<DenramModel> train(const DenramModel& model, const LabeledRasterSet& train_set,
                               const LabeledRasterSet& val_set, const TrainConfig& cfg) {
  return train_impl(model, train_set, val_set, cfg);
}

TrainResult<SrnnModel> train(const SrnnModel& model, const LabeledRasterSet& train_set,
                             const LabeledRasterSet& val_set, const TrainConfig& cfg) {
  return train_impl(model, train_set, val_set, cfg);
}

}  // namespace denram::learn

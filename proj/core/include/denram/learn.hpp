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

#ifndef DENRAM_LEARN_HPP_
#define DENRAM_LEARN_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "denram/data.hpp"
#include "denram/device.hpp"
#include "denram/network.hpp"
#include "denram/random.hpp"

namespace denram::learn {

struct FastSigmoid {
  double slope = 10.0;
};
struct Boxcar {
  double width = 1.0;
};
using Surrogate = std::variant<FastSigmoid, Boxcar>;

// Pseudo-derivative of the spike non-linearity at membrane value v.
double surrogate_derivative(double v, double threshold, const Surrogate& kind);

// Smooth stand-in for the Heaviside spike whose derivative is exactly
// surrogate_derivative. Used by the relaxed SRNN forward.
double relaxed_spike(double v, double threshold, const Surrogate& kind);

struct Sgd {};
struct AdaptiveMoments {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};
using OptimizerKind = std::variant<Sgd, AdaptiveMoments>;

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t epochs_pretrain = 20;
  std::size_t epochs_noise_aware = 20;
  Surrogate surrogate = FastSigmoid{};
  device::NoiseModel noise{0.1, 0};
  std::uint64_t seed = 0;
  OptimizerKind optimizer = AdaptiveMoments{};
  // Noise realizations used for validation during the noise-aware phase.
  std::size_t val_noise_realizations = 1;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double val_loss = 0.0;
  bool noise_aware = false;
  std::uint64_t noise_seed = 0;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // index into epochs; 0 when no epochs ran
};

// CSV with columns epoch,loss,train_acc,val_acc,seed (wall-clock omitted so
// reruns are byte-identical).
std::string history_csv(const TrainHistory& history);

// How the SRNN hidden spikes are computed in the forward pass.
enum class SpikeFunction { Heaviside, Relaxed };

// Gradients are ordered like trainable_parameters(model).
struct LossGrad {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> grads;
  std::size_t correct = 0;
};

std::vector<Eigen::MatrixXd*> trainable_parameters(network::DenramModel& model);
std::vector<Eigen::MatrixXd*> trainable_parameters(network::SrnnModel& model);

// Mean softmax cross-entropy over MaxPotential logits and its gradient with
// respect to the clean weights. With `noise`, the forward pass uses freshly
// perturbed weights and the gradient is passed straight through.
LossGrad loss_and_grads(const network::DenramModel& model, std::span<const data::LabeledRaster> batch,
                        const device::NoiseModel* noise, Rng& rng);
LossGrad loss_and_grads(const network::SrnnModel& model, std::span<const data::LabeledRaster> batch,
                        const device::NoiseModel* noise, Rng& rng,
                        const Surrogate& surrogate = FastSigmoid{},
                        SpikeFunction spike_fn = SpikeFunction::Heaviside);

// Loss only, on the given (already perturbed) weights.
double batch_loss(const network::DenramModel& model, std::span<const data::LabeledRaster> batch);
double batch_loss(const network::SrnnModel& model, std::span<const data::LabeledRaster> batch,
                  const Surrogate& surrogate = FastSigmoid{},
                  SpikeFunction spike_fn = SpikeFunction::Heaviside);

// Perturbs every trainable tensor of a copy of `model` with read noise.
network::DenramModel perturbed(const network::DenramModel& model, const device::NoiseModel& noise,
                               Rng& rng);
network::SrnnModel perturbed(const network::SrnnModel& model, const device::NoiseModel& noise,
                             Rng& rng);

// Two-phase training: epochs_pretrain without noise, then epochs_noise_aware
// with fresh noise per batch. Returns the best-validation model.
template <class Model>
struct TrainResult {
  Model model;
  TrainHistory history;
};

TrainResult<network::DenramModel> train(const network::DenramModel& model,
                                        const data::LabeledRasterSet& train_set,
                                        const data::LabeledRasterSet& val_set,
                                        const TrainConfig& cfg);
TrainResult<network::SrnnModel> train(const network::SrnnModel& model,
                                      const data::LabeledRasterSet& train_set,
                                      const data::LabeledRasterSet& val_set,
                                      const TrainConfig& cfg);

struct EvalResult {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<double> realization_accuracy;
};

// Accuracy under fresh weight-noise draws. relative_std == 0 collapses to a
// single deterministic pass.
EvalResult evaluate(const network::DenramModel& model, const data::LabeledRasterSet& test_set,
                    const device::NoiseModel& noise, std::size_t n_realizations, Rng& rng);
EvalResult evaluate(const network::SrnnModel& model, const data::LabeledRasterSet& test_set,
                    const device::NoiseModel& noise, std::size_t n_realizations, Rng& rng);

// Uniform(+-1/sqrt(fan_in)) initialisation.
void init_weights(network::DenramModel& model, Rng& rng);
void init_weights(network::SrnnModel& model, Rng& rng);

}  // namespace denram::learn

#endif  // DENRAM_LEARN_HPP_

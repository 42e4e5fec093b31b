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


#ifndef DENRAM_HARNESS_CONFIG_HPP_
#define DENRAM_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "denram/analysis.hpp"
#include "denram/data.hpp"
#include "denram/dendrite.hpp"
#include "denram/device.hpp"
#include "denram/learn.hpp"

namespace denram::harness {

// Exit status 2: bad configuration, arguments or input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit status 3: a runtime or load failure (checkpoint, output files).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { SynthCoincidence, Ecg, RasterKws };
enum class ModelKind { Denram, Srnn };

struct SynthCoincidenceParams {
  std::size_t n_train = 200;
  std::size_t n_val = 50;
  std::size_t n_test = 50;
  std::vector<double> lags{10e-3, 30e-3};
  double jitter = 1e-3;
  double dt = 1e-3;
  std::size_t n_steps = 100;
};

struct DataConfig {
  // raster_kws
  std::filesystem::path path;
  std::filesystem::path test_path;  // optional; otherwise split from `path`
  double dt = 0.005;
  std::size_t max_steps = 150;
  std::size_t group_size = 0;  // 0 disables channel sub-sampling
  std::size_t n_groups = 3;
  double test_fraction = 0.2;
  // ecg
  std::filesystem::path record;
  std::filesystem::path annotations;
  data::EcgOptions ecg;
  // shared
  double val_fraction = 0.2;
  SynthCoincidenceParams synth;
};

struct ArchitectureConfig {
  std::size_t n_delays = 8;
  std::size_t n_outputs = 2;
  std::size_t n_hidden = 32;
  double tau_out = 20e-3;
  double tau_hidden = 20e-3;
  double v_threshold = 1.0;
  double decision_threshold = 0.0;
  bool shared_bank = true;
};

struct DelayConfig {
  double mean = 22e-3;
  double sigma = 0.5;
  double clip_min = 8.08e-3;
  double clip_max = 58.26e-3;
};

struct EvalConfig {
  std::vector<double> noise_levels{0.0, 0.05, 0.10, 0.15, 0.20};
  std::size_t realizations = 5;
};

struct SweepConfig {
  std::vector<double> means;
  std::vector<double> sigmas{0.5};
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::size_t> hidden_sizes;
};

struct CdDemoConfig {
  double lag_start = 0.0;
  double lag_stop = 120e-3;
  double lag_step = 1e-3;
  bool separation = false;
};

struct ExperimentConfig {
  Task task = Task::SynthCoincidence;
  ModelKind model = ModelKind::Denram;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  DataConfig data;
  ArchitectureConfig architecture;
  DelayConfig delays;
  device::NoiseModel noise{0.1, 0};
  learn::TrainConfig train;
  EvalConfig eval;
  dendrite::AnalogCircuitParams circuit;
  analysis::EnergyTable energy;
  SweepConfig sweep;
  CdDemoConfig cd_demo;

  // Canonical JSON text (sorted keys, every field present). The manifest
  // hash is computed over this string.
  std::string canonical_json() const;
};

std::string to_string(Task task);
std::string to_string(ModelKind kind);

// Parses JSON text. Unknown keys and type errors raise InputError naming the
// offending path, e.g. `train.batch_size`. Relative data paths resolve
// against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace denram::harness

#endif  // DENRAM_HARNESS_CONFIG_HPP_

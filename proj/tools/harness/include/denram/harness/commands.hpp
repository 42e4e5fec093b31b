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

#ifndef DENRAM_HARNESS_COMMANDS_HPP_
#define DENRAM_HARNESS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "denram/data.hpp"
#include "denram/harness/config.hpp"

namespace denram::harness {

inline constexpr char kToolName[] = "denram";
inline constexpr char kToolVersion[] = "0.1.0";

struct GlobalOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  std::optional<std::size_t> threads;
};

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;  // ERAS; empty means the configured task's test split
  std::vector<double> noise_levels;  // empty means eval.noise_levels
  std::optional<std::size_t> realizations;
};

struct ReportOptions {
  std::filesystem::path run_dir;
};

struct EncodeOptions {
  std::filesystem::path input;  // CSV, value in the last column
  double delta = 0.0;           // 0 picks 0.1 x IQR of the signal
  double dt = data::kEcgDt;
  int label = 0;
  bool binary = false;
};

struct ConvertOptions {
  std::string from;  // ecg | eras | synth_coincidence | synth_sequence
  std::filesystem::path input;
  std::filesystem::path annotations;
  bool binary = false;
  std::size_t n_samples = 500;
  std::size_t n_channels = 32;
  std::size_t n_classes = 5;
};

// Output directory: --out, then $DENRAM_OUT, then config.output_dir, then
// runs/<command>.
std::filesystem::path resolve_output_dir(const GlobalOptions& g, const ExperimentConfig* cfg,
                                         const std::string& command);

// The config named by --config (defaults when empty) with --seed applied.
ExperimentConfig effective_config(const GlobalOptions& g);

struct TaskData {
  data::LabeledRasterSet train;
  data::LabeledRasterSet val;
  data::LabeledRasterSet test;
};

// Builds train/val/test for the configured task. Missing files raise
// InputError naming the path.
TaskData build_task_data(const ExperimentConfig& cfg);

// Each returns the process exit status; failures are thrown as InputError or
// RuntimeFailure.
int cmd_train(const GlobalOptions& g);
int cmd_eval(const GlobalOptions& g, const EvalOptions& opts);
int cmd_cd_demo(const GlobalOptions& g);
int cmd_sweep(const GlobalOptions& g);
int cmd_report(const GlobalOptions& g, const ReportOptions& opts);
int cmd_encode(const GlobalOptions& g, const EncodeOptions& opts);
int cmd_convert(const GlobalOptions& g, const ConvertOptions& opts);

// Maps an exception thrown by a command to an exit status (2 or 3).
int exit_code_for(const std::exception& e);

}  // namespace denram::harness

#endif  // DENRAM_HARNESS_COMMANDS_HPP_

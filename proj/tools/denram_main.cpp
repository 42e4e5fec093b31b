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

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "denram/harness/commands.hpp"
#include "denram/parallel.hpp"

namespace h = denram::harness;

int main(int argc, char** argv) {
  CLI::App app{"DenRAM dendritic delay network simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(h::kToolVersion));

  h::GlobalOptions g;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  app.add_option("--config", g.config, "experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", g.out, "output directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();

  auto* train = app.add_subcommand("train", "train a model and write checkpoint, history and manifest");

  h::EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "accuracy of a checkpoint across read-noise levels");
  eval->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint file")->required();
  eval->add_option("--data", eval_opts.data, "ERAS dataset (default: the config's test split)");
  eval->add_option("--noise", eval_opts.noise_levels, "noise levels, relative to max |w|")->delimiter(',');
  std::size_t realizations = 0;
  auto* real_opt = eval->add_option("--realizations", realizations, "noise draws per level")->check(CLI::PositiveNumber);

  auto* cd = app.add_subcommand("cd-demo", "coincidence detection lag sweep");

  auto* sweep = app.add_subcommand("sweep", "delay distribution or hidden size sweep");

  h::ReportOptions report_opts;
  auto* report = app.add_subcommand("report", "footprint and power of a training run");
  report->add_option("run_dir", report_opts.run_dir, "run directory written by train")->required();

  h::EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "delta-modulate a CSV signal into ERAS");
  encode->add_option("--input", enc.input, "CSV signal, value in the last column")->required();
  encode->add_option("--delta", enc.delta, "threshold (default 0.1 x IQR)");
  encode->add_option("--dt", enc.dt, "sample period, seconds");
  encode->add_option("--label", enc.label, "class label of the sample");
  encode->add_flag("--binary", enc.binary, "write binary ERAS");

  h::ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "convert a dataset to ERAS");
  convert->add_option("--from", conv.from, "ecg | eras | synth_coincidence | synth_sequence")->required();
  convert->add_option("--input", conv.input, "input file");
  convert->add_option("--annotations", conv.annotations, "ECG annotation CSV");
  convert->add_option("--samples", conv.n_samples, "synth_sequence sample count");
  convert->add_option("--channels", conv.n_channels, "synth_sequence channel count");
  convert->add_option("--classes", conv.n_classes, "synth_sequence class count");
  convert->add_flag("--binary", conv.binary, "write binary ERAS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (seed_opt->count()) g.seed = seed;
  if (threads_opt->count()) {
    g.threads = threads;
    denram::set_thread_count(threads);
  }
  if (real_opt->count()) eval_opts.realizations = realizations;

  try {
    if (*train) return h::cmd_train(g);
    if (*eval) return h::cmd_eval(g, eval_opts);
    if (*cd) return h::cmd_cd_demo(g);
    if (*sweep) return h::cmd_sweep(g);
    if (*report) return h::cmd_report(g, report_opts);
    if (*encode) return h::cmd_encode(g, enc);
    if (*convert) return h::cmd_convert(g, conv);
  } catch (const std::exception& e) {
    std::cerr << "denram: " << e.what() << "\n";
    return h::exit_code_for(e);
  }
  return 2;
}

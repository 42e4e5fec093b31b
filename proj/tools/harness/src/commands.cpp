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

#include "denram/harness/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "denram/analysis.hpp"
#include "denram/checkpoint.hpp"
#include "denram/error.hpp"
#include "denram/learn.hpp"
#include "denram/network.hpp"
#include "denram/parallel.hpp"
#include "json.hpp"

namespace denram::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw RuntimeFailure("write failed for " + path.string());
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void require_file(const fs::path& path, const std::string& field) {
  if (path.empty()) throw InputError("config " + field + ": dataset path is not set");
  if (!fs::is_regular_file(path)) throw InputError("dataset not found: " + path.string() + " (" + field + ")");
}

// Runs `fn`, reporting core input errors as InputError.
template <class Fn>
auto as_input(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const ConfigError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const DomainError& e) {
    throw InputError(what + ": " + e.what());
  } catch (const IoError& e) {
    throw InputError(what + ": " + e.what());
  }
}

void write_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& cfg,
                    const std::vector<std::string>& files) {
  const std::string canonical = cfg.canonical_json();
  json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config_hash"] = fnv1a_hex(canonical);
  m["seed"] = cfg.seed;
  m["threads"] = thread_count();
  m["files"] = files;
  m["config"] = json::parse(canonical);
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

void check_outputs(const ExperimentConfig& cfg, int n_classes) {
  const auto n_out = cfg.architecture.n_outputs;
  if (n_out == static_cast<std::size_t>(n_classes)) return;
  if (n_out == 1 && n_classes == 2) return;
  throw InputError("config architecture.n_outputs: " + std::to_string(n_out) + " outputs for a dataset with " +
                   std::to_string(n_classes) + " classes");
}

network::DenramModel make_denram(const ExperimentConfig& cfg, const data::LabeledRasterSet& train) {
  const double dt = train.dt();
  const auto& a = cfg.architecture;
  const auto dist = device::DelayDistribution::from_mean(cfg.delays.mean, cfg.delays.sigma, cfg.delays.clip_min,
                                                         cfg.delays.clip_max);
  Rng bank_rng(derive_seed(cfg.seed, 0));
  network::DenramModel m;
  m.bank = dendrite::DelayBank::sample(dist, train.n_channels(), a.n_delays, dt, bank_rng);
  m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.bank.n_expanded()),
                                    static_cast<Eigen::Index>(a.n_outputs));
  m.lif = network::LifParams::from_time_constant(a.tau_out, dt, a.v_threshold);
  m.alpha_out = std::exp(-dt / a.tau_out);
  m.decision_threshold = a.decision_threshold;
  m.shared_bank = a.shared_bank;
  m.delay_seed = derive_seed(cfg.seed, 0);
  Rng wrng(derive_seed(cfg.seed, 1));
  learn::init_weights(m, wrng);
  return m;
}

network::SrnnModel make_srnn(const ExperimentConfig& cfg, const data::LabeledRasterSet& train) {
  const double dt = train.dt();
  const auto& a = cfg.architecture;
  const auto n_in = static_cast<Eigen::Index>(train.n_channels());
  const auto n_h = static_cast<Eigen::Index>(a.n_hidden);
  const auto n_out = static_cast<Eigen::Index>(a.n_outputs);
  network::SrnnModel m;
  m.w_in = Eigen::MatrixXd::Zero(n_in, n_h);
  m.w_rec = Eigen::MatrixXd::Zero(n_h, n_h);
  m.w_out = Eigen::MatrixXd::Zero(n_h, n_out);
  m.lif_hidden = network::LifParams::from_time_constant(a.tau_hidden, dt, a.v_threshold);
  m.alpha_out = std::exp(-dt / a.tau_out);
  m.decision_threshold = a.decision_threshold;
  Rng wrng(derive_seed(cfg.seed, 1));
  learn::init_weights(m, wrng);
  return m;
}

learn::EvalResult evaluate_any(const network::AnyModel& model, const data::LabeledRasterSet& set,
                               const device::NoiseModel& noise, std::size_t realizations, Rng& rng) {
  return std::visit([&](const auto& m) { return learn::evaluate(m, set, noise, realizations, rng); }, model);
}

void check_model_data(const network::AnyModel& model, const data::LabeledRasterSet& set) {
  if (set.empty()) throw InputError("evaluation dataset is empty");
  std::size_t n_in = 0, n_out = 0;
  double dt = 0.0;
  std::visit(
      [&](const auto& m) {
        n_in = m.n_inputs();
        n_out = m.n_outputs();
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, network::DenramModel>) dt = m.bank.dt();
      },
      model);
  if (set.n_channels() != n_in) {
    throw InputError("shape mismatch: checkpoint expects " + std::to_string(n_in) + " input channels, dataset has " +
                     std::to_string(set.n_channels()));
  }
  if (dt > 0 && std::abs(set.dt() - dt) > 1e-12 * dt) {
    throw InputError("shape mismatch: checkpoint delay bank uses dt=" + fmt(dt) + ", dataset has dt=" +
                     fmt(set.dt()));
  }
  const bool ok = n_out == static_cast<std::size_t>(set.n_classes) || (n_out == 1 && set.n_classes == 2);
  if (!ok) {
    throw InputError("shape mismatch: checkpoint has " + std::to_string(n_out) + " outputs, dataset has " +
                     std::to_string(set.n_classes) + " classes");
  }
}

network::AnyModel load_model(const fs::path& path) {
  try {
    return network::load_checkpoint(path);
  } catch (const std::exception& e) {
    throw RuntimeFailure("cannot load checkpoint " + path.string() + ": " + e.what());
  }
}

data::LabeledRasterSet read_dataset(const fs::path& path, const std::string& field) {
  require_file(path, field);
  return as_input("dataset " + path.string(), [&] { return data::read_eras(path); });
}

std::vector<double> read_signal_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    const bool numeric = end != field.c_str() && std::string(end).find_first_not_of(" \t") == std::string::npos;
    if (!numeric) {
      if (out.empty() && n == 1) continue;  // header
      throw InputError(path.string() + ": line " + std::to_string(n) + ": expected a number, got `" + field + "`");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError(path.string() + ": no samples");
  return out;
}

analysis::DenramTask denram_task(const ExperimentConfig& cfg, TaskData d) {
  analysis::DenramTask t;
  const double dt = d.train.dt();
  t.train = std::move(d.train);
  t.val = std::move(d.val);
  t.test = std::move(d.test);
  t.n_delays = cfg.architecture.n_delays;
  t.n_outputs = cfg.architecture.n_outputs;
  t.tau_out = cfg.architecture.tau_out;
  t.lif = network::LifParams::from_time_constant(cfg.architecture.tau_out, dt, cfg.architecture.v_threshold);
  t.clip_min = cfg.delays.clip_min;
  t.clip_max = cfg.delays.clip_max;
  t.eval_noise = cfg.noise;
  t.eval_realizations = cfg.eval.realizations;
  return t;
}

}  // namespace

fs::path resolve_output_dir(const GlobalOptions& g, const ExperimentConfig* cfg, const std::string& command) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("DENRAM_OUT"); env && *env) return env;
  if (cfg && !cfg->output_dir.empty()) return cfg->output_dir;
  return fs::path("runs") / command;
}

ExperimentConfig effective_config(const GlobalOptions& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.train.seed = *g.seed;
  }
  return cfg;
}

TaskData build_task_data(const ExperimentConfig& cfg) {
  TaskData d;
  const auto& dc = cfg.data;
  switch (cfg.task) {
    case Task::SynthCoincidence: {
      const auto& s = dc.synth;
      as_input("config data.synth", [&] {
        Rng r0(derive_seed(cfg.seed, 100)), r1(derive_seed(cfg.seed, 101)), r2(derive_seed(cfg.seed, 102));
        d.train = data::synth_coincidence_dataset(s.n_train, s.lags, s.jitter, s.dt, s.n_steps, r0);
        d.val = data::synth_coincidence_dataset(s.n_val, s.lags, s.jitter, s.dt, s.n_steps, r1);
        d.test = data::synth_coincidence_dataset(s.n_test, s.lags, s.jitter, s.dt, s.n_steps, r2);
      });
      break;
    }
    case Task::Ecg: {
      require_file(dc.record, "data.record");
      require_file(dc.annotations, "data.annotations");
      auto ecg = as_input("ECG dataset", [&] { return data::load_ecg_segments(dc.record, dc.annotations, dc.ecg); });
      auto split = as_input("ECG dataset", [&] {
        return data::split_train_val(ecg.train, 1.0 - dc.val_fraction, derive_seed(cfg.seed, 3));
      });
      d.train = std::move(split.train);
      d.val = std::move(split.val);
      d.test = std::move(ecg.test);
      break;
    }
    case Task::RasterKws: {
      require_file(dc.path, "data.path");
      const data::RasterLoadOptions lo{dc.dt, dc.max_steps};
      auto prep = [&](const fs::path& p) {
        return as_input("dataset " + p.string(), [&] {
          auto set = data::load_raster_dataset(p, lo);
          if (dc.group_size > 0) set = data::subsample_channels(set, dc.group_size, dc.n_groups);
          return set;
        });
      };
      auto all = prep(dc.path);
      data::LabeledRasterSet rest;
      if (!dc.test_path.empty()) {
        require_file(dc.test_path, "data.test_path");
        d.test = prep(dc.test_path);
        rest = std::move(all);
      } else {
        auto split = as_input("dataset " + dc.path.string(), [&] {
          return data::split_train_val(all, 1.0 - dc.test_fraction, derive_seed(cfg.seed, 4));
        });
        rest = std::move(split.train);
        d.test = std::move(split.val);
      }
      auto split = as_input("dataset " + dc.path.string(), [&] {
        return data::split_train_val(rest, 1.0 - dc.val_fraction, derive_seed(cfg.seed, 3));
      });
      d.train = std::move(split.train);
      d.val = std::move(split.val);
      break;
    }
  }
  d.train.split = "train";
  d.val.split = "val";
  d.test.split = "test";
  if (d.train.empty() || d.test.empty()) throw InputError("dataset has an empty train or test split");
  return d;
}

int cmd_train(const GlobalOptions& g) {
  const auto cfg = effective_config(g);
  const auto d = build_task_data(cfg);
  check_outputs(cfg, d.train.n_classes);
  const auto dir = prepare_dir(resolve_output_dir(g, &cfg, "train"));

  network::AnyModel model;
  learn::TrainHistory history;
  if (cfg.model == ModelKind::Denram) {
    auto r = learn::train(make_denram(cfg, d.train), d.train, d.val, cfg.train);
    model = std::move(r.model);
    history = std::move(r.history);
  } else {
    auto r = learn::train(make_srnn(cfg, d.train), d.train, d.val, cfg.train);
    model = std::move(r.model);
    history = std::move(r.history);
  }
  network::save_checkpoint(dir / "model.ckpt", model);
  write_file(dir / "history.csv", learn::history_csv(history));
  data::write_eras(dir / "test.eras", d.test);

  Rng clean_rng(derive_seed(cfg.seed, 2));
  Rng noisy_rng(derive_seed(cfg.seed, 2));
  const auto clean = evaluate_any(model, d.test, device::NoiseModel{0.0, cfg.noise.seed}, 1, clean_rng);
  const auto noisy = evaluate_any(model, d.test, cfg.noise, cfg.eval.realizations, noisy_rng);
  json m;
  m["model"] = to_string(cfg.model);
  m["task"] = to_string(cfg.task);
  m["best_epoch"] = history.best_epoch;
  m["best_val_accuracy"] = history.epochs.empty() ? 0.0 : history.epochs[history.best_epoch].val_accuracy;
  m["test_accuracy"] = clean.mean_accuracy;
  m["noise"] = cfg.noise.relative_std;
  m["test_accuracy_noisy_mean"] = noisy.mean_accuracy;
  m["test_accuracy_noisy_std"] = noisy.std_accuracy;
  write_file(dir / "metrics.json", m.dump(2) + "\n");
  write_manifest(dir, "train", cfg, {"model.ckpt", "history.csv", "test.eras", "metrics.json"});
  std::cout << "train: test accuracy " << fmt(clean.mean_accuracy) << " (noise " << fmt(cfg.noise.relative_std)
            << ": " << fmt(noisy.mean_accuracy) << ") -> " << dir.string() << "\n";
  return 0;
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& opts) {
  auto cfg = effective_config(g);
  if (opts.checkpoint.empty()) throw InputError("eval needs --checkpoint");
  const auto model = load_model(opts.checkpoint);
  const auto set = opts.data.empty() ? build_task_data(cfg).test : read_dataset(opts.data, "--data");
  check_model_data(model, set);
  const auto levels = opts.noise_levels.empty() ? cfg.eval.noise_levels : opts.noise_levels;
  const std::size_t realizations = opts.realizations.value_or(cfg.eval.realizations);
  if (realizations == 0) throw InputError("--realizations must be >= 1");
  for (double v : levels) {
    if (!(v >= 0)) throw InputError("noise levels must be >= 0");
  }
  const auto dir = prepare_dir(resolve_output_dir(g, &cfg, "eval"));

  std::string csv = "noise,mean_accuracy,std_accuracy\n";
  json rows = json::array();
  bool monotone = true;
  double prev = 2.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    Rng rng(derive_seed(derive_seed(cfg.seed, 2), k));
    const auto r = evaluate_any(model, set, device::NoiseModel{levels[k], cfg.noise.seed}, realizations, rng);
    csv += fmt(levels[k]) + ',' + fmt(r.mean_accuracy) + ',' + fmt(r.std_accuracy) + '\n';
    rows.push_back({{"noise", levels[k]}, {"mean_accuracy", r.mean_accuracy}, {"std_accuracy", r.std_accuracy}});
    if (r.mean_accuracy > prev) monotone = false;
    prev = r.mean_accuracy;
  }
  json m;
  {
    std::ifstream in(opts.checkpoint, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    m["checkpoint_fnv1a"] = fnv1a_hex(bytes.str());
  }
  m["samples"] = set.size();
  m["realizations"] = realizations;
  m["levels"] = rows;
  m["monotone_non_increasing"] = monotone;
  write_file(dir / "eval.csv", csv);
  write_file(dir / "metrics.json", m.dump(2) + "\n");
  write_manifest(dir, "eval", cfg, {"eval.csv", "metrics.json"});
  std::cout << csv;
  return 0;
}

int cmd_cd_demo(const GlobalOptions& g) {
  const auto cfg = effective_config(g);
  const auto dir = prepare_dir(resolve_output_dir(g, &cfg, "cd-demo"));
  const auto& c = cfg.cd_demo;
  const auto setup = c.separation ? network::separation_coincidence_setup() : network::default_coincidence_setup();
  const auto n = static_cast<std::size_t>(std::floor((c.lag_stop - c.lag_start) / c.lag_step + 1e-9)) + 1;
  std::string csv = "lag_ms,peak_potential,fired,spike_count\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double lag = c.lag_start + static_cast<double>(i) * c.lag_step;
    const auto r = as_input("cd-demo", [&] { return network::coincidence_experiment(setup, lag); });
    csv += fmt(std::round(lag * 1e12) / 1e9) + ',' + fmt(r.peak_potential) + ',' + (r.fired ? "1" : "0") + ',' +
           std::to_string(r.spike_count) + '\n';
  }
  write_file(dir / "cd_demo.csv", csv);
  write_manifest(dir, "cd-demo", cfg, {"cd_demo.csv"});
  std::cout << "cd-demo: " << n << " lags -> " << (dir / "cd_demo.csv").string() << "\n";
  return 0;
}

int cmd_sweep(const GlobalOptions& g) {
  const auto cfg = effective_config(g);
  if (cfg.sweep.seeds.empty()) throw InputError("config sweep.seeds: must be non-empty");
  auto d = build_task_data(cfg);
  check_outputs(cfg, d.train.n_classes);
  const auto dir = prepare_dir(resolve_output_dir(g, &cfg, "sweep"));
  if (cfg.model == ModelKind::Denram) {
    if (cfg.sweep.means.empty()) throw InputError("config sweep.means: must be non-empty");
    if (cfg.sweep.sigmas.empty()) throw InputError("config sweep.sigmas: must be non-empty");
    const auto task = denram_task(cfg, std::move(d));
    const auto grid = as_input("sweep", [&] {
      return analysis::sweep_delay_distribution(task, cfg.sweep.means, cfg.sweep.sigmas, cfg.train, cfg.sweep.seeds);
    });
    std::string summary = "mean_s,sigma,accuracy_mean,accuracy_std\n";
    for (const auto& s : grid.summary) {
      summary += fmt(s.mean) + ',' + fmt(s.sigma) + ',' + fmt(s.accuracy_mean) + ',' + fmt(s.accuracy_std) + '\n';
    }
    write_file(dir / "sweep.csv", analysis::sweep_csv(grid));
    write_file(dir / "sweep_summary.csv", summary);
    write_manifest(dir, "sweep", cfg, {"sweep.csv", "sweep_summary.csv"});
    std::cout << summary;
  } else {
    if (cfg.sweep.hidden_sizes.empty()) throw InputError("config sweep.hidden_sizes: must be non-empty");
    analysis::SrnnTask task;
    task.train = std::move(d.train);
    task.val = std::move(d.val);
    task.test = std::move(d.test);
    task.n_outputs = cfg.architecture.n_outputs;
    task.tau_hidden = cfg.architecture.tau_hidden;
    task.tau_out = cfg.architecture.tau_out;
    task.v_threshold = cfg.architecture.v_threshold;
    task.eval_noise = cfg.noise;
    task.eval_realizations = cfg.eval.realizations;
    const auto cells = as_input("sweep", [&] {
      return analysis::sweep_hidden_size(task, cfg.sweep.hidden_sizes, cfg.train, cfg.sweep.seeds);
    });
    const auto csv = analysis::hidden_sweep_csv(cells);
    write_file(dir / "hidden_sweep.csv", csv);
    write_manifest(dir, "sweep", cfg, {"hidden_sweep.csv"});
    std::cout << csv;
  }
  return 0;
}

int cmd_report(const GlobalOptions& g, const ReportOptions& opts) {
  const auto& run = opts.run_dir;
  if (run.empty()) throw InputError("report needs a run directory");
  if (!fs::is_directory(run)) throw InputError("run directory not found: " + run.string());
  for (const char* f : {"manifest.json", "model.ckpt", "test.eras"}) {
    if (!fs::is_regular_file(run / f)) throw InputError("run directory " + run.string() + " has no " + f);
  }
  std::ifstream min(run / "manifest.json");
  std::ostringstream ss;
  ss << min.rdbuf();
  json manifest;
  try {
    manifest = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw InputError((run / "manifest.json").string() + ": " + e.what());
  }
  if (!manifest.contains("config")) throw InputError((run / "manifest.json").string() + ": no config");
  const auto cfg = parse_config(manifest["config"].dump(), {});
  const auto model = load_model(run / "model.ckpt");
  const auto test = read_dataset(run / "test.eras", "test.eras");
  check_model_data(model, test);

  using analysis::DeviceConvention;
  const DeviceConvention conventions[] = {DeviceConvention::TwoPerWeightPlusDelay, DeviceConvention::FourPerSynapse};
  json r;
  json footprints = json::array();
  analysis::FootprintReport own[2];
  analysis::FootprintReport ref[2];
  analysis::EventStats stats;
  std::string reference;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        for (int k = 0; k < 2; ++k) own[k] = analysis::count_footprint(m, conventions[k]);
        stats = analysis::count_events(m, test);
        // Iso-setup counterpart with the same inputs. A binary task uses one
        // DenRAM output against a threshold and two SRNN outputs.
        if constexpr (std::is_same_v<M, network::DenramModel>) {
          reference = "srnn";
          network::SrnnModel s;
          const auto h = static_cast<Eigen::Index>(cfg.architecture.n_hidden);
          s.w_in = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_inputs()), h);
          s.w_rec = Eigen::MatrixXd::Zero(h, h);
          s.w_out = Eigen::MatrixXd::Zero(h, static_cast<Eigen::Index>(test.n_classes));
          for (int k = 0; k < 2; ++k) ref[k] = analysis::count_footprint(s, conventions[k]);
        } else {
          reference = "denram";
          network::DenramModel d;
          Eigen::MatrixXi shifts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(m.n_inputs()),
                                                         static_cast<Eigen::Index>(cfg.architecture.n_delays));
          d.bank = dendrite::DelayBank::from_shifts(shifts, 1.0);
          d.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.bank.n_expanded()),
                                            static_cast<Eigen::Index>(test.n_classes == 2 ? 1 : test.n_classes));
          d.shared_bank = cfg.architecture.shared_bank;
          for (int k = 0; k < 2; ++k) ref[k] = analysis::count_footprint(d, conventions[k]);
        }
      },
      model);
  for (int k = 0; k < 2; ++k) {
    footprints.push_back({{"convention", analysis::to_string(conventions[k])},
                          {"trainable_parameters", own[k].trainable_parameters},
                          {"rram_devices", own[k].rram_devices}});
  }
  const bool is_denram = std::holds_alternative<network::DenramModel>(model);
  // SRNN devices counted two per weight, DenRAM under four per synapse.
  const auto& denram_fp = is_denram ? own[1] : ref[1];
  const auto& srnn_fp = is_denram ? ref[0] : own[0];
  auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };
  r["model"] = is_denram ? "denram" : "srnn";
  r["parameters"] = own[0].trainable_parameters;
  r["footprint"] = footprints;
  r["comparison"] = {
      {"reference", reference},
      {"reference_parameters", ref[0].trainable_parameters},
      {"srnn_hidden", cfg.architecture.n_hidden},
      {"parameter_ratio_srnn_over_denram",
       ratio(static_cast<double>(srnn_fp.trainable_parameters), static_cast<double>(denram_fp.trainable_parameters))},
      {"device_ratio_srnn_over_denram",
       ratio(static_cast<double>(srnn_fp.rram_devices), static_cast<double>(denram_fp.rram_devices))}};
  const auto rates = analysis::rates_of(stats);
  const auto power = as_input("energy", [&] { return analysis::estimate_power(rates, cfg.energy); });
  r["events"] = {{"dendritic_events", stats.dendritic_events},
                 {"neuron_updates", stats.neuron_updates},
                 {"synops", stats.synops},
                 {"simulated_seconds", stats.simulated_seconds},
                 {"dendritic_events_per_s", rates.dendritic_events_per_s},
                 {"neuron_updates_per_s", rates.neuron_updates_per_s},
                 {"synops_per_s", rates.synops_per_s}};
  r["power"] = {{"watts", power.watts},
                {"threshold_block", power.threshold_block},
                {"rc_and_weight", power.rc_and_weight},
                {"mux", power.mux},
                {"neurons", power.neurons},
                {"synapses", power.synapses},
                {"calibration", power.calibration_assumed ? "assumed" : "published"}};
  const fs::path dir = prepare_dir(g.out.empty() ? run : g.out);
  write_file(dir / "report.json", r.dump(2) + "\n");
  std::cout << r.dump(2) << "\n";
  return 0;
}

int cmd_encode(const GlobalOptions& g, const EncodeOptions& opts) {
  if (opts.input.empty()) throw InputError("encode needs --input");
  if (!fs::is_regular_file(opts.input)) throw InputError("input not found: " + opts.input.string());
  if (!(opts.dt > 0)) throw InputError("--dt must be > 0");
  if (opts.label < 0) throw InputError("--label must be >= 0");
  const auto signal = read_signal_csv(opts.input);
  const auto dir = prepare_dir(resolve_output_dir(g, nullptr, "encode"));
  const double delta = opts.delta > 0 ? opts.delta : 0.1 * data::interquartile_range(signal);
  if (!(delta > 0)) throw InputError(opts.input.string() + ": flat signal; pass --delta");
  data::LabeledRasterSet set;
  set.n_classes = std::max(2, opts.label + 1);
  set.samples.push_back({as_input("encode", [&] {
                           return data::delta_modulate(signal, data::DeltaModParams{delta, signal.front()}, opts.dt);
                         }),
                         opts.label});
  const auto name = opts.input.stem().string() + ".eras";
  data::write_eras(dir / name, set, opts.binary);
  std::cout << "encode: " << set.samples.front().raster.total() << " events, delta " << fmt(delta) << " -> "
            << (dir / name).string() << "\n";
  return 0;
}

int cmd_convert(const GlobalOptions& g, const ConvertOptions& opts) {
  const auto cfg = effective_config(g);
  const auto dir = prepare_dir(resolve_output_dir(g, &cfg, "convert"));
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const data::LabeledRasterSet& set) {
    data::write_eras(dir / name, set, opts.binary);
    files.push_back(name);
  };
  if (opts.from == "ecg") {
    require_file(opts.input, "--input");
    require_file(opts.annotations, "--annotations");
    const auto ecg =
        as_input("ECG dataset", [&] { return data::load_ecg_segments(opts.input, opts.annotations, cfg.data.ecg); });
    emit("train.eras", ecg.train);
    emit("test.eras", ecg.test);
    std::cout << "convert: " << ecg.train.size() << " train, " << ecg.test.size() << " test, "
              << ecg.skipped_annotations << " annotations skipped\n";
  } else if (opts.from == "eras") {
    const auto set = read_dataset(opts.input, "--input");
    auto out = as_input("rebin", [&] {
      auto s = data::rebin(set, {cfg.data.dt, cfg.data.max_steps});
      if (cfg.data.group_size > 0) s = data::subsample_channels(s, cfg.data.group_size, cfg.data.n_groups);
      return s;
    });
    emit(opts.input.stem().string() + ".eras", out);
  } else if (opts.from == "synth_coincidence") {
    auto c = cfg;
    c.task = Task::SynthCoincidence;
    const auto d = build_task_data(c);
    emit("train.eras", d.train);
    emit("val.eras", d.val);
    emit("test.eras", d.test);
  } else if (opts.from == "synth_sequence") {
    data::SequenceTaskParams p;
    p.n_channels = opts.n_channels;
    p.n_classes = opts.n_classes;
    p.dt = cfg.data.dt;
    p.n_steps = cfg.data.max_steps;
    Rng rng(derive_seed(cfg.seed, 5));
    const auto set = as_input("synth_sequence", [&] { return data::synth_sequence_dataset(opts.n_samples, p, rng); });
    emit("sequence.eras", set);
  } else {
    throw InputError("convert --from must be one of ecg, eras, synth_coincidence, synth_sequence");
  }
  write_manifest(dir, "convert", cfg, files);
  return 0;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ParseError*>(&e)) {
    return 2;
  }
  return 3;
}

}  // namespace denram::harness

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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "denram/error.hpp"
#include "denram/harness/commands.hpp"
#include "denram/harness/config.hpp"

namespace denram::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto p = fs::path(::testing::TempDir()) / ("denram_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const std::string& json) {
  try {
    (void)parse_config(json);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

fs::path write_config(const fs::path& dir, const std::string& json) {
  const auto p = dir / "config.json";
  std::ofstream(p) << json;
  return p;
}

const char* kQuick = R"({
  "task": "synth_coincidence",
  "data": {"synth": {"n_train": 60, "n_val": 20, "n_test": 20}},
  "train": {"learning_rate": 0.01, "batch_size": 16, "epochs_pretrain": 3, "epochs_noise_aware": 2}
})";

TEST(Config, DefaultsValidate) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.task, Task::SynthCoincidence);
  EXPECT_EQ(c.model, ModelKind::Denram);
  EXPECT_DOUBLE_EQ(c.noise.relative_std, 0.1);
}

TEST(Config, UnknownKeysNamePath) {
  EXPECT_NE(message_of(R"({"train": {"batch_sise": 4}})").find("train.batch_sise"), std::string::npos);
  EXPECT_NE(message_of(R"({"data": {"synth": {"lag": [1]}}})").find("data.synth.lag"), std::string::npos);
  EXPECT_NE(message_of(R"({"colour": 1})").find("colour"), std::string::npos);
}

TEST(Config, TypeAndRangeErrorsNamePath) {
  EXPECT_NE(message_of(R"({"train": {"batch_size": -1}})").find("train.batch_size"), std::string::npos);
  EXPECT_NE(message_of(R"({"delays": {"sigma": "wide"}})").find("delays.sigma"), std::string::npos);
  EXPECT_NE(message_of(R"({"delays": {"sigma": 0}})").find("delays"), std::string::npos);
  EXPECT_NE(message_of(R"({"eval": {"noise_levels": [0, -0.1]}})").find("eval.noise_levels"), std::string::npos);
  EXPECT_NE(message_of(R"({"energy": {"frac_mux": 0.5}})").find("energy"), std::string::npos);
  EXPECT_NE(message_of(R"({"task": "mnist"})").find("task"), std::string::npos);
  EXPECT_NE(message_of("{not json").find("JSON"), std::string::npos);
}

TEST(Config, CanonicalJsonRoundTrips) {
  const auto a = parse_config(kQuick);
  const auto b = parse_config(a.canonical_json());
  EXPECT_EQ(a.canonical_json(), b.canonical_json());
  EXPECT_EQ(fnv1a_hex(a.canonical_json()), fnv1a_hex(b.canonical_json()));
  EXPECT_NE(fnv1a_hex(a.canonical_json()), fnv1a_hex(parse_config("{}").canonical_json()));
}

TEST(Config, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
  const auto c = parse_config(R"({"data": {"path": "x.eras"}})", "/base");
  EXPECT_EQ(c.data.path, fs::path("/base/x.eras"));
}

// Synthetic single-lead record on a slow baseline: narrow beats are normal, wide ones anomalous.
void write_ecg_fixture(const fs::path& dir) {
  std::ofstream rec(dir / "record.csv");
  std::ofstream ann(dir / "annotations.csv");
  rec << "sample,mlii\n";
  ann << "sample,symbol\n";
  const int beats = 80, period = 300;
  std::vector<double> x(static_cast<std::size_t>(beats * period + period));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.3 * std::sin(2 * std::numbers::pi * static_cast<double>(i) / 700.0);
  for (int b = 0; b < beats; ++b) {
    const int centre = period / 2 + b * period;
    const bool wide = b % 4 == 3;
    const double width = wide ? 25.0 : 6.0;
    for (int k = -60; k <= 60; ++k) {
      x[static_cast<std::size_t>(centre + k)] += std::exp(-0.5 * (k / width) * (k / width));
    }
    ann << centre << ',' << (wide ? "V" : "N") << '\n';
  }
  ann << 10 << ",+\n";
  for (std::size_t i = 0; i < x.size(); ++i) rec << i << ',' << x[i] << '\n';
}

TEST(Commands, EcgRunsReportFootprints) {
  const auto dir = scratch("ecg");
  write_ecg_fixture(dir);
  for (const auto& [model, outputs, params] :
       {std::tuple{"denram", 1, 16}, std::tuple{"srnn", 2, 1152}}) {
    GlobalOptions g;
    g.config = write_config(dir, std::string(R"({"task": "ecg", "model": ")") + model + R"(",
      "data": {"record": "record.csv", "annotations": "annotations.csv"},
      "architecture": {"n_outputs": )" + std::to_string(outputs) + R"(, "n_hidden": 32},
      "train": {"batch_size": 16, "epochs_pretrain": 2, "epochs_noise_aware": 1},
      "eval": {"realizations": 1}})");
    g.out = dir / model;
    ASSERT_EQ(cmd_train(g), 0);
    ReportOptions r;
    r.run_dir = g.out;
    ASSERT_EQ(cmd_report({}, r), 0);
    const auto report = slurp(g.out / "report.json");
    EXPECT_NE(report.find("\"parameters\": " + std::to_string(params)), std::string::npos) << model;
  }
}

TEST(Commands, MissingDatasetIsInputErrorNamingPath) {
  const auto dir = scratch("missing");
  GlobalOptions g;
  g.config = write_config(dir, R"({"task": "raster_kws", "data": {"path": "absent.eras"}})");
  g.out = dir / "out";
  try {
    cmd_train(g);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("absent.eras"), std::string::npos);
    EXPECT_EQ(exit_code_for(e), 2);
  }
}

TEST(Commands, UnreadableCheckpointIsRuntimeFailure) {
  const auto dir = scratch("badckpt");
  std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  GlobalOptions g;
  g.out = dir / "out";
  EvalOptions e;
  e.checkpoint = dir / "junk.ckpt";
  try {
    cmd_eval(g, e);
    FAIL() << "expected RuntimeFailure";
  } catch (const RuntimeFailure& ex) {
    EXPECT_EQ(exit_code_for(ex), 3);
  }
}

TEST(Commands, EmptyRunDirIsInputError) {
  const auto dir = scratch("emptyrun");
  ReportOptions r;
  r.run_dir = dir;
  EXPECT_THROW(cmd_report({}, r), InputError);
}

TEST(Commands, TrainTwiceGivesIdenticalOutputs) {
  const auto dir = scratch("determinism");
  GlobalOptions g;
  g.config = write_config(dir, kQuick);
  g.out = dir / "a";
  ASSERT_EQ(cmd_train(g), 0);
  g.out = dir / "b";
  ASSERT_EQ(cmd_train(g), 0);
  for (const char* f : {"history.csv", "model.ckpt", "test.eras", "manifest.json"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_FALSE(slurp(dir / "a" / "history.csv").empty());
}

TEST(Commands, SeedFlagChangesOutputs) {
  const auto dir = scratch("seedflag");
  GlobalOptions g;
  g.config = write_config(dir, kQuick);
  g.out = dir / "a";
  cmd_train(g);
  g.seed = 7;
  g.out = dir / "b";
  cmd_train(g);
  EXPECT_NE(slurp(dir / "a" / "history.csv"), slurp(dir / "b" / "history.csv"));
}

TEST(Commands, EvalAndReportOnTrainedRun) {
  const auto dir = scratch("evalreport");
  GlobalOptions g;
  g.config = write_config(dir, kQuick);
  g.out = dir / "run";
  cmd_train(g);
  GlobalOptions ge = g;
  ge.out = dir / "eval";
  EvalOptions e;
  e.checkpoint = dir / "run" / "model.ckpt";
  e.data = dir / "run" / "test.eras";
  e.noise_levels = {0.0};
  ASSERT_EQ(cmd_eval(ge, e), 0);
  const auto csv = slurp(dir / "eval" / "eval.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  ReportOptions r;
  r.run_dir = dir / "run";
  ASSERT_EQ(cmd_report({}, r), 0);
  EXPECT_NE(slurp(dir / "run" / "report.json").find("\"parameters\": 32"), std::string::npos);
}

TEST(Commands, EvalRejectsShapeMismatch) {
  const auto dir = scratch("shape");
  GlobalOptions g;
  g.config = write_config(dir, kQuick);
  g.out = dir / "run";
  cmd_train(g);
  GlobalOptions gc;
  gc.out = dir / "seq";
  ConvertOptions c;
  c.from = "synth_sequence";
  c.n_samples = 10;
  cmd_convert(gc, c);
  EvalOptions e;
  e.checkpoint = dir / "run" / "model.ckpt";
  e.data = dir / "seq" / "sequence.eras";
  GlobalOptions ge;
  ge.out = dir / "eval";
  try {
    cmd_eval(ge, e);
    FAIL() << "expected InputError";
  } catch (const InputError& ex) {
    EXPECT_NE(std::string(ex.what()).find("shape mismatch"), std::string::npos);
  }
}

TEST(Commands, CdDemoSingleContiguousWindow) {
  const auto dir = scratch("cd");
  GlobalOptions g;
  g.out = dir;
  ASSERT_EQ(cmd_cd_demo(g), 0);
  std::istringstream in(slurp(dir / "cd_demo.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lag_ms,peak_potential,fired,spike_count");
  int rows = 0, transitions = 0;
  char prev = '0';
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ls(line);
    std::string lag, peak, fired;
    std::getline(ls, lag, ',');
    std::getline(ls, peak, ',');
    std::getline(ls, fired, ',');
    if (fired[0] != prev) ++transitions;
    prev = fired[0];
  }
  EXPECT_EQ(rows, 121);
  EXPECT_LE(transitions, 2);
  EXPECT_GE(transitions, 1);
}

TEST(Commands, SweepRowCountMatchesGrid) {
  const auto dir = scratch("sweep");
  GlobalOptions g;
  g.config = write_config(dir, R"({
    "data": {"synth": {"n_train": 40, "n_val": 10, "n_test": 10}},
    "train": {"batch_size": 16, "epochs_pretrain": 1, "epochs_noise_aware": 0},
    "eval": {"realizations": 1},
    "sweep": {"means": [0.01, 0.03], "sigmas": [0.3, 0.5, 0.7], "seeds": [0, 1]}
  })");
  g.out = dir / "out";
  ASSERT_EQ(cmd_sweep(g), 0);
  const auto csv = slurp(dir / "out" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 3 * 2);
}

TEST(Commands, EncodeWritesOneSample) {
  const auto dir = scratch("encode");
  {
    std::ofstream s(dir / "signal.csv");
    s << "index,value\n";
    for (int i = 0; i < 100; ++i) s << i << ',' << 0.05 * i << '\n';
  }
  GlobalOptions g;
  g.out = dir / "out";
  EncodeOptions e;
  e.input = dir / "signal.csv";
  e.delta = 0.1;
  e.dt = 1e-3;
  ASSERT_EQ(cmd_encode(g, e), 0);
  const auto set = data::read_eras(dir / "out" / "signal.eras");
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.samples[0].raster.n_channels(), 2u);
  EXPECT_EQ(set.samples[0].raster.n_steps(), 100u);
}

TEST(Commands, EncodeRejectsGarbage) {
  const auto dir = scratch("encodebad");
  std::ofstream(dir / "s.csv") << "1\n2\nthree\n";
  GlobalOptions g;
  g.out = dir / "out";
  EncodeOptions e;
  e.input = dir / "s.csv";
  EXPECT_THROW(cmd_encode(g, e), InputError);
}

}  // namespace
}  // namespace denram::harness

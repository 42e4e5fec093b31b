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

#include "denram/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "denram/error.hpp"

namespace denram::harness {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so that the
// rest can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    read(j_.at(key), qualify(key), out);
  }

  // Nested object; returns nullopt when absent.
  std::optional<Fields> sub(const char* key) {
    if (!j_.contains(key)) return std::nullopt;
    seen_.insert(key);
    return Fields(j_.at(key), qualify(key));
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(qualify(k), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw InputError("config " + where + ": " + what);
  }

 private:
  std::string qualify(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  static void read(const json& v, const std::string& where, double& out) {
    if (!v.is_number()) fail(where, "expected a number");
    out = v.get<double>();
  }
  static void read(const json& v, const std::string& where, bool& out) {
    if (!v.is_boolean()) fail(where, "expected true or false");
    out = v.get<bool>();
  }
  static void read(const json& v, const std::string& where, std::string& out) {
    if (!v.is_string()) fail(where, "expected a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, const std::string& where, std::filesystem::path& out) {
    std::string s;
    read(v, where, s);
    out = s;
  }
  static void read(const json& v, const std::string& where, std::uint64_t& out) {
    if (!v.is_number_unsigned()) fail(where, "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  static void read(const json& v, const std::string& where, int& out) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    out = v.get<int>();
  }
  template <class T>
  static void read(const json& v, const std::string& where, std::vector<T>& out) {
    if (!v.is_array()) fail(where, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T x{};
      read(v[i], where + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
void guarded(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    Fields::fail(where, e.what());
  }
}

Task parse_task(const std::string& s) {
  if (s == "synth_coincidence") return Task::SynthCoincidence;
  if (s == "ecg") return Task::Ecg;
  if (s == "raster_kws") return Task::RasterKws;
  Fields::fail("task", "expected one of synth_coincidence, ecg, raster_kws; got `" + s + "`");
}

ModelKind parse_model(const std::string& s) {
  if (s == "denram") return ModelKind::Denram;
  if (s == "srnn") return ModelKind::Srnn;
  Fields::fail("model", "expected denram or srnn; got `" + s + "`");
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

void parse_data(Fields& f, DataConfig& d, const std::filesystem::path& base) {
  f.get("path", d.path);
  f.get("test_path", d.test_path);
  f.get("dt", d.dt);
  f.get("max_steps", d.max_steps);
  f.get("group_size", d.group_size);
  f.get("n_groups", d.n_groups);
  f.get("test_fraction", d.test_fraction);
  f.get("val_fraction", d.val_fraction);
  f.get("record", d.record);
  f.get("annotations", d.annotations);
  if (auto e = f.sub("ecg")) {
    e->get("window", d.ecg.window);
    e->get("delta", d.ecg.delta);
    e->finish();
  }
  if (auto s = f.sub("synth")) {
    s->get("n_train", d.synth.n_train);
    s->get("n_val", d.synth.n_val);
    s->get("n_test", d.synth.n_test);
    s->get("lags", d.synth.lags);
    s->get("jitter", d.synth.jitter);
    s->get("dt", d.synth.dt);
    s->get("n_steps", d.synth.n_steps);
    s->finish();
  }
  f.finish();
  for (auto* p : {&d.path, &d.test_path, &d.record, &d.annotations}) *p = resolve(*p, base);
  if (!(d.val_fraction > 0 && d.val_fraction < 1)) Fields::fail("data.val_fraction", "must be in (0, 1)");
  if (!(d.test_fraction > 0 && d.test_fraction < 1)) Fields::fail("data.test_fraction", "must be in (0, 1)");
  if (!(d.dt > 0)) Fields::fail("data.dt", "must be > 0");
  if (d.max_steps == 0) Fields::fail("data.max_steps", "must be >= 1");
}

void parse_train(Fields& f, learn::TrainConfig& t) {
  f.get("learning_rate", t.learning_rate);
  f.get("batch_size", t.batch_size);
  f.get("epochs_pretrain", t.epochs_pretrain);
  f.get("epochs_noise_aware", t.epochs_noise_aware);
  f.get("val_noise_realizations", t.val_noise_realizations);
  if (auto s = f.sub("surrogate")) {
    std::string kind = "fast_sigmoid";
    s->get("kind", kind);
    if (kind == "fast_sigmoid") {
      learn::FastSigmoid fs;
      s->get("slope", fs.slope);
      t.surrogate = fs;
    } else if (kind == "boxcar") {
      learn::Boxcar box;
      s->get("width", box.width);
      t.surrogate = box;
    } else {
      Fields::fail("train.surrogate.kind", "expected fast_sigmoid or boxcar");
    }
    s->finish();
  }
  if (auto o = f.sub("optimizer")) {
    std::string kind = "adam";
    o->get("kind", kind);
    if (kind == "adam") {
      learn::AdaptiveMoments am;
      o->get("beta1", am.beta1);
      o->get("beta2", am.beta2);
      o->get("epsilon", am.epsilon);
      t.optimizer = am;
    } else if (kind == "sgd") {
      t.optimizer = learn::Sgd{};
    } else {
      Fields::fail("train.optimizer.kind", "expected adam or sgd");
    }
    o->finish();
  }
  f.finish();
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::SynthCoincidence:
      return "synth_coincidence";
    case Task::Ecg:
      return "ecg";
    case Task::RasterKws:
      return "raster_kws";
  }
  return "unknown";
}

std::string to_string(ModelKind kind) { return kind == ModelKind::Denram ? "denram" : "srnn"; }

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Fields f(root, "");
  std::string s;
  if (f.has("task")) {
    f.get("task", s);
    c.task = parse_task(s);
  }
  if (f.has("model")) {
    f.get("model", s);
    c.model = parse_model(s);
  }
  f.get("seed", c.seed);
  f.get("output_dir", c.output_dir);
  if (auto d = f.sub("data")) parse_data(*d, c.data, base_dir);
  if (auto a = f.sub("architecture")) {
    auto& x = c.architecture;
    a->get("n_delays", x.n_delays);
    a->get("n_outputs", x.n_outputs);
    a->get("n_hidden", x.n_hidden);
    a->get("tau_out", x.tau_out);
    a->get("tau_hidden", x.tau_hidden);
    a->get("v_threshold", x.v_threshold);
    a->get("decision_threshold", x.decision_threshold);
    a->get("shared_bank", x.shared_bank);
    a->finish();
    if (x.n_delays == 0 || x.n_outputs == 0 || x.n_hidden == 0) {
      Fields::fail("architecture", "n_delays, n_outputs and n_hidden must be >= 1");
    }
    if (!(x.tau_out > 0) || !(x.tau_hidden > 0)) Fields::fail("architecture", "time constants must be > 0");
  }
  if (auto d = f.sub("delays")) {
    d->get("mean", c.delays.mean);
    d->get("sigma", c.delays.sigma);
    d->get("clip_min", c.delays.clip_min);
    d->get("clip_max", c.delays.clip_max);
    d->finish();
  }
  guarded("delays", [&] {
    (void)device::DelayDistribution::from_mean(c.delays.mean, c.delays.sigma, c.delays.clip_min, c.delays.clip_max);
  });
  if (auto n = f.sub("noise")) {
    n->get("relative_std", c.noise.relative_std);
    n->get("seed", c.noise.seed);
    n->finish();
  }
  guarded("noise", [&] { c.noise.validate(); });
  if (auto t = f.sub("train")) parse_train(*t, c.train);
  c.train.noise = c.noise;
  c.train.seed = c.seed;
  guarded("train", [&] { c.train.validate(); });
  if (auto e = f.sub("eval")) {
    e->get("noise_levels", c.eval.noise_levels);
    e->get("realizations", c.eval.realizations);
    e->finish();
    if (c.eval.noise_levels.empty()) Fields::fail("eval.noise_levels", "must be non-empty");
    for (double v : c.eval.noise_levels) {
      if (!(v >= 0)) Fields::fail("eval.noise_levels", "entries must be >= 0");
    }
    if (c.eval.realizations == 0) Fields::fail("eval.realizations", "must be >= 1");
  }
  if (auto k = f.sub("circuit")) {
    k->get("v_ref", c.circuit.v_ref);
    k->get("v_th", c.circuit.v_th);
    k->get("capacitance", c.circuit.capacitance);
    k->get("pulse_height", c.circuit.pulse_height);
    k->get("pulse_width", c.circuit.pulse_width);
    k->finish();
  }
  guarded("circuit", [&] { c.circuit.validate(); });
  if (auto e = f.sub("energy")) {
    auto& t = c.energy;
    e->get("e_dendritic_event", t.e_dendritic_event);
    e->get("frac_threshold_block", t.frac_threshold_block);
    e->get("frac_rc_and_weight", t.frac_rc_and_weight);
    e->get("frac_mux", t.frac_mux);
    e->get("e_neuron_update", t.e_neuron_update);
    e->get("e_synop", t.e_synop);
    e->get("neuron_synop_assumed", t.neuron_synop_assumed);
    e->finish();
  }
  guarded("energy", [&] { c.energy.validate(); });
  if (auto s = f.sub("sweep")) {
    s->get("means", c.sweep.means);
    s->get("sigmas", c.sweep.sigmas);
    s->get("seeds", c.sweep.seeds);
    s->get("hidden_sizes", c.sweep.hidden_sizes);
    s->finish();
  }
  if (auto d = f.sub("cd_demo")) {
    d->get("lag_start", c.cd_demo.lag_start);
    d->get("lag_stop", c.cd_demo.lag_stop);
    d->get("lag_step", c.cd_demo.lag_step);
    d->get("separation", c.cd_demo.separation);
    d->finish();
    if (!(c.cd_demo.lag_step > 0) || c.cd_demo.lag_stop < c.cd_demo.lag_start || c.cd_demo.lag_start < 0) {
      Fields::fail("cd_demo", "needs 0 <= lag_start <= lag_stop and lag_step > 0");
    }
  }
  f.finish();
  c.output_dir = resolve(c.output_dir, base_dir);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["task"] = to_string(task);
  j["model"] = to_string(model);
  j["seed"] = seed;
  j["data"] = {{"path", data.path.string()},
               {"test_path", data.test_path.string()},
               {"dt", data.dt},
               {"max_steps", data.max_steps},
               {"group_size", data.group_size},
               {"n_groups", data.n_groups},
               {"test_fraction", data.test_fraction},
               {"val_fraction", data.val_fraction},
               {"record", data.record.string()},
               {"annotations", data.annotations.string()},
               {"ecg", {{"window", data.ecg.window}, {"delta", data.ecg.delta}}},
               {"synth",
                {{"n_train", data.synth.n_train},
                 {"n_val", data.synth.n_val},
                 {"n_test", data.synth.n_test},
                 {"lags", data.synth.lags},
                 {"jitter", data.synth.jitter},
                 {"dt", data.synth.dt},
                 {"n_steps", data.synth.n_steps}}}};
  const auto& a = architecture;
  j["architecture"] = {{"n_delays", a.n_delays},       {"n_outputs", a.n_outputs},
                       {"n_hidden", a.n_hidden},       {"tau_out", a.tau_out},
                       {"tau_hidden", a.tau_hidden},   {"v_threshold", a.v_threshold},
                       {"decision_threshold", a.decision_threshold},
                       {"shared_bank", a.shared_bank}};
  j["delays"] = {{"mean", delays.mean}, {"sigma", delays.sigma}, {"clip_min", delays.clip_min},
                 {"clip_max", delays.clip_max}};
  j["noise"] = {{"relative_std", noise.relative_std}, {"seed", noise.seed}};
  json surrogate;
  if (const auto* fs = std::get_if<learn::FastSigmoid>(&train.surrogate)) {
    surrogate = {{"kind", "fast_sigmoid"}, {"slope", fs->slope}};
  } else {
    surrogate = {{"kind", "boxcar"}, {"width", std::get<learn::Boxcar>(train.surrogate).width}};
  }
  json optimizer;
  if (const auto* am = std::get_if<learn::AdaptiveMoments>(&train.optimizer)) {
    optimizer = {{"kind", "adam"}, {"beta1", am->beta1}, {"beta2", am->beta2}, {"epsilon", am->epsilon}};
  } else {
    optimizer = {{"kind", "sgd"}};
  }
  j["train"] = {{"learning_rate", train.learning_rate},
                {"batch_size", train.batch_size},
                {"epochs_pretrain", train.epochs_pretrain},
                {"epochs_noise_aware", train.epochs_noise_aware},
                {"val_noise_realizations", train.val_noise_realizations},
                {"surrogate", surrogate},
                {"optimizer", optimizer}};
  j["eval"] = {{"noise_levels", eval.noise_levels}, {"realizations", eval.realizations}};
  j["circuit"] = {{"v_ref", circuit.v_ref},
                  {"v_th", circuit.v_th},
                  {"capacitance", circuit.capacitance},
                  {"pulse_height", circuit.pulse_height},
                  {"pulse_width", circuit.pulse_width}};
  j["energy"] = {{"e_dendritic_event", energy.e_dendritic_event},
                 {"frac_threshold_block", energy.frac_threshold_block},
                 {"frac_rc_and_weight", energy.frac_rc_and_weight},
                 {"frac_mux", energy.frac_mux},
                 {"e_neuron_update", energy.e_neuron_update},
                 {"e_synop", energy.e_synop},
                 {"neuron_synop_assumed", energy.neuron_synop_assumed}};
  j["sweep"] = {{"means", sweep.means},
                {"sigmas", sweep.sigmas},
                {"seeds", sweep.seeds},
                {"hidden_sizes", sweep.hidden_sizes}};
  j["cd_demo"] = {{"lag_start", cd_demo.lag_start},
                  {"lag_stop", cd_demo.lag_stop},
                  {"lag_step", cd_demo.lag_step},
                  {"separation", cd_demo.separation}};
  return j.dump(2);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace denram::harness

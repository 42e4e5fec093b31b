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

#include "denram/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "denram/error.hpp"
#include "text_util.hpp"

namespace denram::data {

std::vector<std::size_t> LabeledRasterSet::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(n_classes, 0)), 0);
  for (const auto& s : samples) {
    if (s.label >= 0 && static_cast<std::size_t>(s.label) < counts.size()) ++counts[static_cast<std::size_t>(s.label)];
  }
  return counts;
}

void LabeledRasterSet::validate() const {
  if (n_classes < 1) throw ConfigError("dataset needs n_classes >= 1");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.label < 0 || s.label >= n_classes) {
      throw ConfigError("sample " + std::to_string(i) + " label " + std::to_string(s.label) +
                        " outside [0, " + std::to_string(n_classes) + ")");
    }
    if (s.raster.n_channels() != n_channels() || s.raster.dt() != dt()) {
      throw ConfigError("sample " + std::to_string(i) + " disagrees on n_channels or dt");
    }
  }
}

// ---- delta modulation ---------------------------------------------------------

SpikeRaster delta_modulate(std::span<const double> signal, const DeltaModParams& params, double dt) {
  if (!(params.delta > 0)) throw DomainError("delta modulation needs delta > 0");
  if (signal.empty()) throw DomainError("delta modulation needs a non-empty signal");
  SpikeRaster out(2, signal.size(), dt);
  double r = params.initial;
  for (std::size_t t = 0; t < signal.size(); ++t) {
    std::uint32_t up = 0;
    std::uint32_t down = 0;
    while (signal[t] - r > params.delta) {
      r += params.delta;
      ++up;
    }
    while (r - signal[t] > params.delta) {
      r -= params.delta;
      ++down;
    }
    if (up) out.set(0, t, up);
    if (down) out.set(1, t, down);
  }
  return out;
}

// ---- ECG ------------------------------------------------------------------------

int ecg_label(const std::string& symbol) {
  static const std::set<std::string> normal{"L", "R", "N"};
  static const std::set<std::string> anomaly{"e", "j", "A", "a", "J", "S",
                                             "V", "E", "F", "/", "f", "Q"};
  if (normal.count(symbol)) return 0;
  if (anomaly.count(symbol)) return 1;
  return -1;
}

double interquartile_range(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return quantile(0.75) - quantile(0.25);
}

EcgDataset make_ecg_segments(std::span<const double> signal,
                             std::span<const std::pair<std::size_t, std::string>> beats,
                             const EcgOptions& options) {
  if (options.window == 0) throw ConfigError("ECG window must be >= 1");
  EcgDataset out;
  out.delta = options.delta > 0 ? options.delta : 0.1 * interquartile_range(signal);
  if (!(out.delta > 0)) throw ConfigError("ECG record is flat; cannot derive a delta threshold");

  std::vector<std::pair<std::size_t, int>> kept;
  for (const auto& [index, symbol] : beats) {
    if (index >= signal.size()) {
      throw ConfigError("annotation at sample " + std::to_string(index) + " beyond record length " +
                        std::to_string(signal.size()));
    }
    const int label = ecg_label(symbol);
    if (label < 0) {
      ++out.skipped_annotations;
      continue;
    }
    kept.emplace_back(index, label);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  LabeledRasterSet all;
  all.n_classes = 2;
  std::vector<double> window(options.window);
  const auto half = static_cast<long long>(options.window / 2);
  for (const auto& [peak, label] : kept) {
    const long long start = static_cast<long long>(peak) - half;
    for (std::size_t k = 0; k < options.window; ++k) {
      const long long idx = start + static_cast<long long>(k);
      window[k] = (idx >= 0 && idx < static_cast<long long>(signal.size()))
                      ? signal[static_cast<std::size_t>(idx)]
                      : 0.0;
    }
    all.samples.push_back({delta_modulate(window, {out.delta, window.front()}, options.dt), label});
  }

  // Time-ordered halves.
  const std::size_t n_train = all.samples.size() / 2;
  out.train.n_classes = out.test.n_classes = 2;
  out.train.split = "train";
  out.test.split = "test";
  for (std::size_t i = 0; i < all.samples.size(); ++i) {
    (i < n_train ? out.train : out.test).samples.push_back(std::move(all.samples[i]));
  }
  return out;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::pair<std::string_view, std::string_view> split_pair(std::string_view line) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos) return {line, {}};
  return {detail::trim(line.substr(0, comma)), detail::trim(line.substr(comma + 1))};
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

bool parse_real(std::string_view s, double& out) {
  const std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return !tmp.empty() && end == tmp.c_str() + tmp.size();
}

}  // namespace

EcgDataset load_ecg_segments(const std::filesystem::path& record,
                             const std::filesystem::path& annotations, const EcgOptions& options) {
  std::vector<double> signal;
  const auto rec_lines = read_lines(record);
  for (std::size_t n = 0; n < rec_lines.size(); ++n) {
    const auto line = detail::trim(rec_lines[n]);
    if (line.empty()) continue;
    auto [idx_s, val_s] = split_pair(line);
    std::size_t idx = 0;
    double value = 0.0;
    if (!parse_size(idx_s, idx) || !parse_real(val_s, value)) {
      if (n == 0) continue;  // header
      throw ParseError("expected `sample_index,value` in " + record.string(), n + 1);
    }
    if (idx != signal.size()) {
      throw ParseError("record sample indices must be contiguous from 0", n + 1);
    }
    signal.push_back(value);
  }
  std::vector<std::pair<std::size_t, std::string>> beats;
  const auto ann_lines = read_lines(annotations);
  for (std::size_t n = 0; n < ann_lines.size(); ++n) {
    const auto line = detail::trim(ann_lines[n]);
    if (line.empty()) continue;
    auto [idx_s, sym] = split_pair(line);
    std::size_t idx = 0;
    if (!parse_size(idx_s, idx) || sym.empty()) {
      if (n == 0) continue;
      throw ParseError("expected `sample_index,symbol` in " + annotations.string(), n + 1);
    }
    beats.emplace_back(idx, std::string(sym));
  }
  if (signal.empty()) throw ParseError("ECG record " + record.string() + " has no samples", 0);
  return make_ecg_segments(signal, beats, options);
}

// ---- transforms ---------------------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> channel_groups(std::size_t n_channels,
                                                                std::size_t group_size,
                                                                std::size_t n_groups) {
  if (group_size == 0 || n_groups == 0) throw DomainError("group_size and n_groups must be >= 1");
  if (group_size > n_channels) {
    throw DomainError("group_size " + std::to_string(group_size) + " exceeds " +
                      std::to_string(n_channels) + " channels");
  }
  const std::size_t block = std::min(n_channels / n_groups, group_size);
  if (block == 0) throw DomainError("too many groups for the channel count");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t g = 0; g < n_groups; ++g) out.emplace_back(g * block, (g + 1) * block);
  return out;
}

LabeledRasterSet subsample_channels(const LabeledRasterSet& set, std::size_t group_size,
                                    std::size_t n_groups) {
  LabeledRasterSet out;
  out.n_classes = set.n_classes;
  out.split = set.split;
  if (set.empty()) return out;
  const auto groups = channel_groups(set.n_channels(), group_size, n_groups);
  for (const auto& s : set.samples) {
    for (const auto& [first, last] : groups) {
      SpikeRaster r(group_size, s.raster.n_steps(), s.raster.dt());
      for (std::size_t c = first; c < last; ++c) {
        const auto src = s.raster.channel(c);
        for (std::size_t t = 0; t < src.size(); ++t) {
          if (src[t]) r.set(c - first, t, src[t]);
        }
      }
      out.samples.push_back({std::move(r), s.label});
    }
  }
  return out;
}

Split split_train_val(const LabeledRasterSet& set, double train_fraction, std::uint64_t seed) {
  if (set.size() < 2) throw DomainError("split_train_val needs at least 2 samples");
  if (!(train_fraction > 0 && train_fraction < 1)) throw DomainError("train fraction must be in (0, 1)");
  const auto n_classes = static_cast<std::size_t>(std::max(set.n_classes, 1));
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < set.size(); ++i) {
    by_class[static_cast<std::size_t>(set.samples[i].label)].push_back(i);
  }
  // Largest-remainder allocation of round(fraction * n) training samples.
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(set.size())));
  std::vector<std::size_t> take(n_classes);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double exact = train_fraction * static_cast<double>(by_class[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n_train && k < remainders.size(); ++k) {
    const std::size_t c = remainders[k].second;
    if (take[c] < by_class[c].size()) {
      ++take[c];
      ++assigned;
    }
  }

  Rng rng(seed);
  std::vector<bool> in_train(set.size(), false);
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto idx = by_class[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < take[c]; ++k) in_train[idx[k]] = true;
  }
  Split out;
  out.train.n_classes = out.val.n_classes = set.n_classes;
  out.train.split = "train";
  out.val.split = "val";
  for (std::size_t i = 0; i < set.size(); ++i) {
    (in_train[i] ? out.train : out.val).samples.push_back(set.samples[i]);
  }
  return out;
}

// ---- synthetic tasks ----------------------------------------------------------------------

LabeledRasterSet synth_coincidence_dataset(std::size_t n_samples, std::span<const double> lags,
                                           double jitter, double dt, std::size_t n_steps, Rng& rng) {
  if (lags.size() < 2) throw ConfigError("coincidence task needs at least two lag classes");
  if (!(dt > 0) || !(jitter >= 0)) throw ConfigError("coincidence task needs dt > 0, jitter >= 0");
  std::vector<double> sorted(lags.begin(), lags.end());
  std::sort(sorted.begin(), sorted.end());
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < sorted.size(); ++k) min_gap = std::min(min_gap, sorted[k] - sorted[k - 1]);
  if (!(min_gap > 0)) throw ConfigError("coincidence lags must be distinct");
  if (!(jitter < min_gap / 2)) throw ConfigError("jitter must be below half the smallest lag gap");
  if (sorted.front() - jitter < 0) throw ConfigError("lags minus jitter must be >= 0");

  const double latest = sorted.back() + jitter;
  const auto span_bins = static_cast<std::size_t>(std::ceil(latest / dt)) + 1;
  if (n_steps <= span_bins) throw ConfigError("n_steps too short for the largest lag");

  LabeledRasterSet out;
  out.n_classes = static_cast<int>(lags.size());
  std::uniform_int_distribution<std::size_t> onset(0, n_steps - span_bins - 1);
  std::uniform_real_distribution<double> jit(-jitter, jitter);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::size_t cls = i % lags.size();
    const std::size_t t0 = onset(rng);
    const double second = static_cast<double>(t0) * dt + lags[cls] + (jitter > 0 ? jit(rng) : 0.0);
    const auto t1 = static_cast<std::size_t>(std::nearbyint(second / dt));
    SpikeRaster r(2, n_steps, dt);
    r.add(0, t0);
    r.add(1, std::min(t1, n_steps - 1));
    out.samples.push_back({std::move(r), static_cast<int>(cls)});
  }
  return out;
}

LabeledRasterSet synth_sequence_dataset(std::size_t n_samples, const SequenceTaskParams& p, Rng& rng) {
  if (p.n_groups < 2 || p.n_channels < p.n_groups) throw ConfigError("sequence task needs >= 2 groups");
  std::vector<std::size_t> perm(p.n_groups);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> orders;
  do {
    orders.push_back(perm);
  } while (orders.size() < p.n_classes && std::next_permutation(perm.begin(), perm.end()));
  if (orders.size() < p.n_classes) throw ConfigError("not enough group orderings for n_classes");

  const std::size_t group_width = p.n_channels / p.n_groups;
  const double last_burst = p.onset_jitter + p.burst_gap * static_cast<double>(p.n_groups - 1) + p.burst_jitter;
  if (last_burst / p.dt >= static_cast<double>(p.n_steps)) throw ConfigError("sequence does not fit n_steps");

  LabeledRasterSet out;
  out.n_classes = static_cast<int>(p.n_classes);
  std::uniform_real_distribution<double> onset(0.0, p.onset_jitter);
  std::uniform_real_distribution<double> jit(-p.burst_jitter, p.burst_jitter);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double background_p = p.background_rate * p.dt;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::size_t cls = i % p.n_classes;
    SpikeRaster r(p.n_channels, p.n_steps, p.dt);
    const double t0 = onset(rng);
    for (std::size_t pos = 0; pos < p.n_groups; ++pos) {
      const std::size_t group = orders[cls][pos];
      const double burst = t0 + p.burst_gap * static_cast<double>(pos);
      for (std::size_t c = group * group_width; c < (group + 1) * group_width; ++c) {
        if (unit(rng) >= p.spike_prob) continue;
        const double t = std::max(0.0, burst + jit(rng));
        const auto bin = std::min(static_cast<std::size_t>(t / p.dt), p.n_steps - 1);
        r.add(c, bin);
      }
    }
    for (std::size_t c = 0; c < p.n_channels; ++c) {
      for (std::size_t t = 0; t < p.n_steps; ++t) {
        if (unit(rng) < background_p) r.add(c, t);
      }
    }
    out.samples.push_back({std::move(r), static_cast<int>(cls)});
  }
  return out;
}

}  // namespace denram::data

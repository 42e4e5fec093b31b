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

#ifndef DENRAM_DATA_HPP_
#define DENRAM_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "denram/dendrite.hpp"
#include "denram/random.hpp"

namespace denram::data {

using dendrite::SpikeRaster;

struct LabeledRaster {
  SpikeRaster raster;
  int label = 0;

  friend bool operator==(const LabeledRaster&, const LabeledRaster&) = default;
};

struct LabeledRasterSet {
  std::vector<LabeledRaster> samples;
  int n_classes = 2;
  std::string split;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t n_channels() const { return empty() ? 0 : samples.front().raster.n_channels(); }
  double dt() const { return empty() ? 0.0 : samples.front().raster.dt(); }
  std::vector<std::size_t> class_counts() const;

  // Throws ConfigError when rasters disagree on dt / n_channels or a label is
  // out of range.
  void validate() const;
};

// ---- delta modulation -------------------------------------------------------

struct DeltaModParams {
  double delta = 0.1;
  double initial = 0.0;
};

// UP (channel 0) / DOWN (channel 1) spike counts against a running
// reconstruction that moves by +-delta per emitted spike.
SpikeRaster delta_modulate(std::span<const double> signal, const DeltaModParams& params,
                           double dt);

// ---- ECG --------------------------------------------------------------------

inline constexpr double kEcgDt = 1.0 / 360.0;

struct EcgOptions {
  std::size_t window = 180;
  // <= 0 selects 0.1 x interquartile range of the record.
  double delta = 0.0;
  double dt = kEcgDt;
};

struct EcgDataset {
  LabeledRasterSet train;
  LabeledRasterSet test;
  std::size_t skipped_annotations = 0;
  double delta = 0.0;
};

// 0 = normal (L, R, N), 1 = anomaly, -1 = not a beat label.
int ecg_label(const std::string& symbol);

// Record file: `sample_index,value` per line; annotation file:
// `sample_index,symbol`. A non-numeric first line is treated as a header.
EcgDataset load_ecg_segments(const std::filesystem::path& record,
                             const std::filesystem::path& annotations,
                             const EcgOptions& options = {});

// Same, from in-memory columns (signal indexed by sample number).
EcgDataset make_ecg_segments(std::span<const double> signal,
                             std::span<const std::pair<std::size_t, std::string>> beats,
                             const EcgOptions& options = {});

double interquartile_range(std::span<const double> values);

// ---- ERAS event-raster files --------------------------------------------------

struct ErasHeader {
  std::size_t n_channels = 0;
  double dt = 0.0;
  std::size_t n_steps = 0;
  int n_classes = 0;
};

inline constexpr char kErasBinaryMagic[9] = "ERASBIN1";

std::string to_eras_text(const LabeledRasterSet& set);
std::string to_eras_binary(const LabeledRasterSet& set);
// Accepts the text and the binary encodings.
LabeledRasterSet parse_eras(const std::string& contents);

void write_eras(const std::filesystem::path& path, const LabeledRasterSet& set,
                bool binary = false);
LabeledRasterSet read_eras(const std::filesystem::path& path);

struct RasterLoadOptions {
  double dt = 0.005;          // target bin width
  std::size_t max_steps = 150;  // truncation (750 ms at 5 ms bins)
};

// Reads an ERAS file, re-bins its events to `options.dt` and truncates to
// `options.max_steps`.
LabeledRasterSet load_raster_dataset(const std::filesystem::path& path,
                                     const RasterLoadOptions& options = {});
LabeledRasterSet rebin(const LabeledRasterSet& set, const RasterLoadOptions& options);

// ---- transforms ---------------------------------------------------------------

// Splits the channel axis into `n_groups` disjoint blocks of
// min(floor(n / n_groups), group_size) channels; every block becomes a
// `group_size`-channel sample (unused trailing channels stay empty).
LabeledRasterSet subsample_channels(const LabeledRasterSet& set, std::size_t group_size = 256,
                                    std::size_t n_groups = 3);

// Channel ranges [first, last) used by subsample_channels.
std::vector<std::pair<std::size_t, std::size_t>> channel_groups(std::size_t n_channels,
                                                                std::size_t group_size,
                                                                std::size_t n_groups);

struct Split {
  LabeledRasterSet train;
  LabeledRasterSet val;
};

// Stratified seeded split; per-class counts within +-1 of proportional.
Split split_train_val(const LabeledRasterSet& set, double train_fraction, std::uint64_t seed);

// ---- synthetic tasks ----------------------------------------------------------

// Two channels; channel 0 fires at a random t0, channel 1 at
// t0 + lags[class] + U(-jitter, jitter). Classes are assigned round-robin.
LabeledRasterSet synth_coincidence_dataset(std::size_t n_samples, std::span<const double> lags,
                                           double jitter, double dt, std::size_t n_steps,
                                           Rng& rng);

// Keyword-spotting stand-in: every class activates the same channel groups
// in a class-specific temporal order, so classes differ only in timing.
struct SequenceTaskParams {
  std::size_t n_channels = 32;
  std::size_t n_classes = 5;
  std::size_t n_groups = 3;        // channel groups per utterance
  double dt = 0.005;
  std::size_t n_steps = 150;
  double burst_gap = 0.15;         // seconds between consecutive groups
  double onset_jitter = 0.05;      // uniform start offset range, seconds
  double burst_jitter = 0.01;      // per-burst timing jitter, seconds
  double spike_prob = 0.8;         // per channel in an active group
  double background_rate = 1.0;    // Hz per channel
};

LabeledRasterSet synth_sequence_dataset(std::size_t n_samples, const SequenceTaskParams& params,
                                        Rng& rng);

}  // namespace denram::data

#endif  // DENRAM_DATA_HPP_

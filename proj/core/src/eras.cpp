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

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "denram/data.hpp"
#include "denram/error.hpp"
#include "text_util.hpp"

namespace denram::data {

namespace {

ErasHeader header_of(const LabeledRasterSet& set) {
  set.validate();
  ErasHeader h;
  h.n_classes = set.n_classes;
  if (!set.empty()) {
    h.n_channels = set.n_channels();
    h.dt = set.dt();
    h.n_steps = set.samples.front().raster.n_steps();
    for (const auto& s : set.samples) {
      if (s.raster.n_steps() != h.n_steps) throw ConfigError("ERAS needs equal n_steps across samples");
    }
  }
  return h;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    const std::string tmp(s);
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && std::isfinite(out);
  } else {
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, out);
    return r.ec == std::errc() && r.ptr == end;
  }
}

template <class T>
T keyed(std::string_view token, std::string_view key, std::size_t line) {
  const std::string prefix = std::string(key) + "=";
  T value{};
  if (token.substr(0, prefix.size()) != prefix || !parse_number(token.substr(prefix.size()), value)) {
    throw ParseError("expected " + prefix + "<value>, got `" + std::string(token) + "`", line);
  }
  return value;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

LabeledRasterSet parse_text(const std::string& contents) {
  std::vector<std::string_view> lines;
  std::string_view rest(contents);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    auto line = rest.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw ParseError("empty ERAS file", 1);

  const auto head = tokens(lines[0]);
  if (head.size() != 6 || head[0] != "ERAS" || head[1] != "v1") {
    throw ParseError("expected `ERAS v1 n_channels=.. dt=.. n_steps=.. n_classes=..`", 1);
  }
  ErasHeader h;
  h.n_channels = keyed<std::size_t>(head[2], "n_channels", 1);
  h.dt = keyed<double>(head[3], "dt", 1);
  h.n_steps = keyed<std::size_t>(head[4], "n_steps", 1);
  h.n_classes = keyed<int>(head[5], "n_classes", 1);
  if (!(h.dt > 0)) throw ParseError("dt must be > 0", 1);
  if (h.n_classes < 1) throw ParseError("n_classes must be >= 1", 1);

  LabeledRasterSet set;
  set.n_classes = h.n_classes;
  std::size_t n = 1;
  while (n < lines.size()) {
    if (lines[n].empty()) {
      ++n;
      continue;
    }
    const std::size_t line_no = n + 1;
    const auto t = tokens(lines[n]);
    std::size_t id = 0;
    if (t.size() != 4 || t[0] != "#" || t[1] != "sample" || !parse_number(t[2], id)) {
      throw ParseError("expected `# sample <id> label=<int>`", line_no);
    }
    if (id != set.samples.size()) throw ParseError("sample ids must count up from 0", line_no);
    const int label = keyed<int>(t[3], "label", line_no);
    if (label < 0 || label >= h.n_classes) throw ParseError("label out of range", line_no);

    SpikeRaster r(h.n_channels, h.n_steps, h.dt);
    ++n;
    for (; n < lines.size() && !lines[n].empty(); ++n) {
      const auto line = lines[n];
      const auto c1 = line.find(',');
      const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
      std::size_t ch = 0, bin = 0;
      std::uint32_t count = 0;
      if (c2 == std::string_view::npos || !parse_number(line.substr(0, c1), ch) ||
          !parse_number(line.substr(c1 + 1, c2 - c1 - 1), bin) ||
          !parse_number(line.substr(c2 + 1), count)) {
        throw ParseError("expected `<channel>,<time_bin>,<count>`", n + 1);
      }
      if (ch >= h.n_channels || bin >= h.n_steps) throw ParseError("event outside raster bounds", n + 1);
      r.add(ch, bin, count);
    }
    set.samples.push_back({std::move(r), label});
  }
  return set;
}

// Little-endian fixed-width primitives.
class Writer {
 public:
  template <class T>
  void put(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out_.append(reinterpret_cast<const char*>(b), sizeof(T));
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > s_.size()) throw ParseError("truncated ERAS binary at byte " + std::to_string(pos_), 0);
    unsigned char b[sizeof(T)];
    std::memcpy(b, s_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  void skip(std::size_t n) { pos_ += n; }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

LabeledRasterSet parse_binary(const std::string& contents) {
  Reader in(contents);
  in.skip(8);
  ErasHeader h;
  h.n_channels = in.get<std::uint64_t>();
  h.dt = in.get<double>();
  h.n_steps = in.get<std::uint64_t>();
  h.n_classes = in.get<std::int32_t>();
  if (!(h.dt > 0) || h.n_classes < 1) throw ParseError("bad ERAS binary header", 0);
  const auto n_samples = in.get<std::uint64_t>();
  LabeledRasterSet set;
  set.n_classes = h.n_classes;
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const auto label = in.get<std::int32_t>();
    if (label < 0 || label >= h.n_classes) throw ParseError("label out of range in sample " + std::to_string(s), 0);
    const auto n_events = in.get<std::uint64_t>();
    SpikeRaster r(h.n_channels, h.n_steps, h.dt);
    for (std::uint64_t e = 0; e < n_events; ++e) {
      const auto ch = in.get<std::uint32_t>();
      const auto bin = in.get<std::uint32_t>();
      const auto count = in.get<std::uint32_t>();
      if (ch >= h.n_channels || bin >= h.n_steps) throw ParseError("event outside raster bounds", 0);
      r.add(ch, bin, count);
    }
    set.samples.push_back({std::move(r), label});
  }
  if (!in.done()) throw ParseError("trailing bytes after ERAS binary payload", 0);
  return set;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_eras_text(const LabeledRasterSet& set) {
  const auto h = header_of(set);
  std::string out = "ERAS v1 n_channels=" + std::to_string(h.n_channels) +
                    " dt=" + detail::format_double(h.dt) + " n_steps=" + std::to_string(h.n_steps) +
                    " n_classes=" + std::to_string(h.n_classes) + "\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += "# sample " + std::to_string(i) + " label=" + std::to_string(set.samples[i].label) + "\n";
    for (const auto& e : set.samples[i].raster.events()) {
      out += std::to_string(e.channel) + ',' + std::to_string(e.step) + ',' + std::to_string(e.count) + '\n';
    }
    out += '\n';
  }
  return out;
}

std::string to_eras_binary(const LabeledRasterSet& set) {
  const auto h = header_of(set);
  Writer w;
  w.raw(kErasBinaryMagic, 8);
  w.put<std::uint64_t>(h.n_channels);
  w.put<double>(h.dt);
  w.put<std::uint64_t>(h.n_steps);
  w.put<std::int32_t>(h.n_classes);
  w.put<std::uint64_t>(set.size());
  for (const auto& s : set.samples) {
    const auto events = s.raster.events();
    w.put<std::int32_t>(s.label);
    w.put<std::uint64_t>(events.size());
    for (const auto& e : events) {
      w.put<std::uint32_t>(e.channel);
      w.put<std::uint32_t>(e.step);
      w.put<std::uint32_t>(e.count);
    }
  }
  return w.take();
}

LabeledRasterSet parse_eras(const std::string& contents) {
  if (contents.size() >= 8 && std::memcmp(contents.data(), kErasBinaryMagic, 8) == 0) {
    return parse_binary(contents);
  }
  return parse_text(contents);
}

void write_eras(const std::filesystem::path& path, const LabeledRasterSet& set, bool binary) {
  const auto bytes = binary ? to_eras_binary(set) : to_eras_text(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

LabeledRasterSet read_eras(const std::filesystem::path& path) {
  try {
    return parse_eras(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

LabeledRasterSet rebin(const LabeledRasterSet& set, const RasterLoadOptions& options) {
  if (!(options.dt > 0) || options.max_steps == 0) throw ConfigError("rebin needs dt > 0 and max_steps >= 1");
  LabeledRasterSet out;
  out.n_classes = set.n_classes;
  out.split = set.split;
  for (const auto& s : set.samples) {
    const double src_dt = s.raster.dt();
    const double span = static_cast<double>(s.raster.n_steps()) * src_dt;
    const auto natural = static_cast<std::size_t>(std::ceil(span / options.dt - 1e-9));
    const std::size_t n_steps = std::clamp<std::size_t>(natural, 1, options.max_steps);
    SpikeRaster r(s.raster.n_channels(), n_steps, options.dt);
    for (const auto& e : s.raster.events()) {
      const double t = static_cast<double>(e.step) * src_dt;
      const auto bin = static_cast<std::size_t>(std::floor(t / options.dt + 1e-9));
      if (bin < n_steps) r.add(e.channel, bin, e.count);
    }
    out.samples.push_back({std::move(r), s.label});
  }
  return out;
}

LabeledRasterSet load_raster_dataset(const std::filesystem::path& path, const RasterLoadOptions& options) {
  return rebin(read_eras(path), options);
}

}  // namespace denram::data

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

#include "denram/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "denram/error.hpp"

namespace denram::network {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  template <class T>
  void put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_matrix(const Eigen::MatrixXd& m) {
    put<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.size(); ++k) put<double>(m.data()[k]);
  }
  void put_lif(const LifParams& p) {
    put<double>(p.alpha);
    put<double>(p.v_threshold);
    put<std::int32_t>(p.refractory_bins);
  }
  std::string take() { return std::move(out_); }
  void raw(const char* data, std::size_t n) { out_.append(data, n); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > in_.size()) throw ParseError("checkpoint truncated", 0);
    T value;
    std::memcpy(&value, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  Eigen::MatrixXd get_matrix() {
    const auto rows = get<std::uint64_t>();
    const auto cols = get<std::uint64_t>();
    if (rows > (1ULL << 32) || cols > (1ULL << 32) ||
        rows * cols * sizeof(double) > in_.size() - pos_) {
      throw ParseError("checkpoint matrix shape exceeds payload", 0);
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = get<double>();
    return m;
  }
  LifParams get_lif() {
    LifParams p;
    p.alpha = get<double>();
    p.v_threshold = get<double>();
    p.refractory_bins = get<std::int32_t>();
    return p;
  }
  std::string_view raw(std::size_t n) {
    if (pos_ + n > in_.size()) throw ParseError("checkpoint truncated", 0);
    std::string_view v(in_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

void write_denram(Writer& w, const DenramModel& m) {
  const auto& bank = m.bank;
  w.put<std::uint64_t>(bank.n_channels());
  w.put<std::uint64_t>(bank.n_delays());
  w.put<std::uint64_t>(m.n_outputs());
  w.put<double>(bank.dt());
  for (Eigen::Index k = 0; k < bank.delays().size(); ++k) w.put<double>(bank.delays().data()[k]);
  for (Eigen::Index k = 0; k < bank.shifts().size(); ++k) {
    w.put<std::int32_t>(bank.shifts().data()[k]);
  }
  w.put_matrix(m.weights);
  w.put_lif(m.lif);
  w.put<double>(m.alpha_out);
  w.put<std::uint8_t>(m.readout == ReadoutMode::MaxPotential ? 0 : 1);
  w.put<double>(m.decision_threshold);
  w.put<std::uint8_t>(m.shared_bank ? 1 : 0);
  w.put<std::uint64_t>(m.delay_seed);
}

DenramModel read_denram(Reader& r) {
  const auto n_in = r.get<std::uint64_t>();
  const auto n_delays = r.get<std::uint64_t>();
  const auto n_out = r.get<std::uint64_t>();
  const double dt = r.get<double>();
  if (n_in > (1ULL << 24) || n_delays > (1ULL << 24)) throw ParseError("checkpoint shape too large", 0);
  Eigen::MatrixXd delays(static_cast<Eigen::Index>(n_in), static_cast<Eigen::Index>(n_delays));
  for (Eigen::Index k = 0; k < delays.size(); ++k) delays.data()[k] = r.get<double>();
  Eigen::MatrixXi shifts(delays.rows(), delays.cols());
  for (Eigen::Index k = 0; k < shifts.size(); ++k) shifts.data()[k] = r.get<std::int32_t>();

  DenramModel m;
  m.bank = dendrite::DelayBank(std::move(delays), dt);
  if (m.bank.shifts() != shifts) throw ParseError("checkpoint shifts disagree with delays", 0);
  m.weights = r.get_matrix();
  if (static_cast<std::uint64_t>(m.weights.cols()) != n_out) {
    throw ParseError("checkpoint weight columns disagree with header", 0);
  }
  m.lif = r.get_lif();
  m.alpha_out = r.get<double>();
  m.readout = r.get<std::uint8_t>() == 0 ? ReadoutMode::MaxPotential : ReadoutMode::SpikeCount;
  m.decision_threshold = r.get<double>();
  m.shared_bank = r.get<std::uint8_t>() != 0;
  m.delay_seed = r.get<std::uint64_t>();
  return m;
}

void write_srnn(Writer& w, const SrnnModel& m) {
  w.put<std::uint64_t>(m.n_inputs());
  w.put<std::uint64_t>(m.n_hidden());
  w.put<std::uint64_t>(m.n_outputs());
  w.put_matrix(m.w_in);
  w.put_matrix(m.w_rec);
  w.put_matrix(m.w_out);
  w.put_lif(m.lif_hidden);
  w.put<double>(m.alpha_out);
  w.put<double>(m.decision_threshold);
}

SrnnModel read_srnn(Reader& r) {
  r.get<std::uint64_t>();
  r.get<std::uint64_t>();
  r.get<std::uint64_t>();
  SrnnModel m;
  m.w_in = r.get_matrix();
  m.w_rec = r.get_matrix();
  m.w_out = r.get_matrix();
  m.lif_hidden = r.get_lif();
  m.alpha_out = r.get<double>();
  m.decision_threshold = r.get<double>();
  return m;
}

}  // namespace

std::string serialize_checkpoint(const AnyModel& model) {
  Writer w;
  w.raw(kCheckpointMagic, 8);
  w.put<std::uint32_t>(kCheckpointVersion);
  if (const auto* d = std::get_if<DenramModel>(&model)) {
    w.put<std::uint8_t>(0);
    write_denram(w, *d);
  } else {
    w.put<std::uint8_t>(1);
    write_srnn(w, std::get<SrnnModel>(model));
  }
  return w.take();
}

AnyModel deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (bytes.size() < 8 || r.raw(8) != std::string_view(kCheckpointMagic, 8)) {
    throw ParseError("not a denram checkpoint (bad magic)", 0);
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), 0);
  }
  const auto kind = r.get<std::uint8_t>();
  AnyModel out;
  try {
    if (kind == 0) {
      auto m = read_denram(r);
      m.validate();
      out = std::move(m);
    } else if (kind == 1) {
      auto m = read_srnn(r);
      m.validate();
      out = std::move(m);
    } else {
      throw ParseError("unknown checkpoint model kind", 0);
    }
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid checkpoint: ") + e.what(), 0);
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid checkpoint: ") + e.what(), 0);
  }
  if (!r.done()) throw ParseError("trailing bytes after checkpoint payload", 0);
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const AnyModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  const auto bytes = serialize_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

AnyModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace denram::network

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

#ifndef DENRAM_CHECKPOINT_HPP_
#define DENRAM_CHECKPOINT_HPP_

// Binary model container. Layout (little-endian):
//   magic "DNRMCKPT" | u32 version | u8 kind (0 DenRAM, 1 SRNN) | payload
// DenRAM payload: u64 n_in, n_delays, n_out | f64 dt | f64 delays[n_in*n_delays]
//   | i32 shifts[...] | MAT weights | LIF | f64 alpha_out | u8 readout
//   | f64 decision_threshold | u8 shared_bank | u64 delay_seed
// SRNN payload: u64 n_in, n_h, n_out | MAT w_in | MAT w_rec | MAT w_out | LIF
//   | f64 alpha_out | f64 decision_threshold
// MAT: u64 rows | u64 cols | f64 values, column-major
// LIF: f64 alpha | f64 v_threshold | i32 refractory_bins

#include <filesystem>
#include <string>
#include <variant>

#include "denram/network.hpp"

namespace denram::network {

inline constexpr char kCheckpointMagic[9] = "DNRMCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

using AnyModel = std::variant<DenramModel, SrnnModel>;

std::string serialize_checkpoint(const AnyModel& model);
AnyModel deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_checkpoint(const std::filesystem::path& path);

}  // namespace denram::network

#endif  // DENRAM_CHECKPOINT_HPP_

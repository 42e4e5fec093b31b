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

#ifndef DENRAM_PARALLEL_HPP_
#define DENRAM_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace denram {

// Worker count used by batch-parallel loops. Defaults to DENRAM_THREADS when
// set, otherwise the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Calls fn(i) for i in [0, n) across worker threads. Each index is processed
// exactly once; callers write results to per-index slots and reduce in order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace denram

#endif  // DENRAM_PARALLEL_HPP_

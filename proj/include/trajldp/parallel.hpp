// Copyright 2026 The trajldp Authors
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

#ifndef TRAJLDP_PARALLEL_HPP_
#define TRAJLDP_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace trajldp {

inline std::size_t worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Splits [0, n) into at most worker_count() contiguous chunks and runs
// fn(chunk, begin, end) for each, one thread per chunk. Returns the number of
// chunks used. The first exception thrown by any chunk is rethrown.
template <typename Fn>
std::size_t parallel_chunks(std::size_t n, Fn&& fn) {
  const std::size_t chunks = std::max<std::size_t>(1, std::min(worker_count(), n));
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return 1;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return chunks;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace trajldp

#endif  // TRAJLDP_PARALLEL_HPP_

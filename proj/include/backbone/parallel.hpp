// Copyright 2026 The backbone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BACKBONE_PARALLEL_HPP_
#define BACKBONE_PARALLEL_HPP_

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace backbone {

// Environment variable that overrides the default worker count.
inline constexpr const char* kThreadsEnvVar = "BACKBONE_NUM_THREADS";

// BACKBONE_NUM_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t default_thread_count();

// Resolves a requested worker count; 0 means default_thread_count().
inline std::size_t resolve_threads(std::size_t requested) {
  return requested == 0 ? default_thread_count() : requested;
}

// Runs fn(index, worker) for every index in [0, count) using a static block
// partition over `threads` workers. Worker w always receives the same
// contiguous block for a given (count, threads), and the first exception
// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads > count) threads = count == 0 ? 1 : count;
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, std::size_t{0});
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t begin = count * w / threads;
    const std::size_t end = count * (w + 1) / threads;
    workers.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i, w);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

// Number of workers parallel_for will actually use.
inline std::size_t effective_workers(std::size_t count, std::size_t threads) {
  threads = resolve_threads(threads);
  if (threads > count) threads = count == 0 ? 1 : count;
  return threads == 0 ? 1 : threads;
}

}  // namespace backbone

#endif  // BACKBONE_PARALLEL_HPP_

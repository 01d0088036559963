// Copyright 2026 The PathForge Authors.
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

#ifndef PATHFORGE_SRC_PARALLEL_H_
#define PATHFORGE_SRC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pathforge {

// Runs fn(index, worker) for index in [0, n) on up to `jobs` threads.
// Items are claimed in increasing order. The first exception thrown by any
// item is rethrown after all workers stop.
template <class Fn>
void ParallelFor(size_t n, int jobs, Fn &&fn) {
  size_t workers = std::clamp<size_t>(jobs < 1 ? 1 : jobs, 1, std::max<size_t>(n, 1));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&](int worker) {
    for (;;) {
      if (failed.load()) return;
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i, worker);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (size_t w = 1; w < workers; ++w) threads.emplace_back(run, static_cast<int>(w));
  run(0);
  for (auto &t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pathforge

#endif  // PATHFORGE_SRC_PARALLEL_H_

// SPDX-License-Identifier: Apache-2.0
//
// fdpc-lab: dirty paper coding rates over fading channels with imperfect CSIT
// Copyright (C) 2026 The fdpc-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fdpc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace fdpc {
namespace {

std::atomic<int> g_threads{0};
thread_local bool t_inside_parallel = false;

}  // namespace

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

int thread_count() {
    int n = g_threads.load();
    if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int workers = static_cast<int>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1 || t_inside_parallel) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    // Indices are claimed in increasing order, so the smallest failing index is
    // reported regardless of scheduling.
    std::exception_ptr first_error;
    std::size_t first_error_index = n;
    std::mutex error_mutex;
    auto worker = [&] {
        t_inside_parallel = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
                next.store(n);
            }
        }
        t_inside_parallel = false;
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fdpc

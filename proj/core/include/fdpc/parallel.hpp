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

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace fdpc {

/// Worker count used by parallel_for. Results never depend on this value:
/// every reduction in the library runs over fixed-size chunks combined in
/// index order.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Nested calls run sequentially on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

inline constexpr std::size_t kReduceChunk = 512;

/// Deterministic ordered reduction. The range is split into chunks of
/// kReduceChunk; each chunk is accumulated sequentially (possibly on another
/// thread) and the chunk partials are then combined in chunk order.
template <class Acc, class Init, class Add, class Merge>
Acc ordered_reduce(std::size_t n, Init init, Add add, Merge merge) {
    const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<Acc> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        Acc acc = init();
        const std::size_t end = std::min(n, (c + 1) * kReduceChunk);
        for (std::size_t i = c * kReduceChunk; i < end; ++i) add(acc, i);
        partial[c] = std::move(acc);
    });
    Acc total = init();
    for (auto& p : partial) merge(total, p);
    return total;
}

}  // namespace fdpc

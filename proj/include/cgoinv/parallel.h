// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace cgoinv {

// Process-wide default worker count used when a call passes threads <= 0.
// Initially std::thread::hardware_concurrency().
int DefaultThreads();
void SetDefaultThreads(int threads);

// Runs body(i) for i in [0, count) on up to `threads` workers with static
// chunking. Each index is processed exactly once, so results written to
// per-index slots do not depend on the worker count. The first exception
// thrown by any worker is rethrown after all workers join.
void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& body);

}  // namespace cgoinv

// SPDX-License-Identifier: Apache-2.0
#include "cgoinv/parallel.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cgoinv {
namespace {

std::atomic<int>& DefaultThreadsSlot() {
  static std::atomic<int> slot{
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()))};
  return slot;
}

}  // namespace

int DefaultThreads() { return DefaultThreadsSlot().load(); }

void SetDefaultThreads(int threads) {
  DefaultThreadsSlot().store(std::max(1, threads));
}

void ParallelFor(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& body) {
  if (threads <= 0) threads = DefaultThreads();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cgoinv

#include "cim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cim {

std::size_t chunk_count(std::size_t n) {
  return (n + kReduceChunk - 1) / kReduceChunk;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Pulls task indices from a shared counter; first exception wins and is
// rethrown on the caller thread.
void run_tasks(std::size_t tasks, int threads,
               const std::function<void(std::size_t)>& task) {
  threads = resolve_threads(threads);
  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), tasks));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= tasks) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(n);
  run_tasks(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kReduceChunk;
    const std::size_t end = std::min(n, begin + kReduceChunk);
    fn(c, begin, end);
  });
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  run_tasks(n, threads, fn);
}

}  // namespace cim

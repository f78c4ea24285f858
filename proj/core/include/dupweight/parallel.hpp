#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dupweight {

// Runs fn(begin, end, worker) over [0, n) split into `workers` contiguous
// chunks with fixed boundaries. Chunk layout depends only on (n, workers),
// never on scheduling, so deterministic merges are possible downstream.
// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_chunks(size_t n, int workers, Fn&& fn) {
  if (workers < 1) workers = 1;
  size_t w = static_cast<size_t>(workers);
  if (w > n) w = n == 0 ? 1 : n;
  if (w <= 1) {
    fn(size_t{0}, n, 0);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (size_t t = 0; t < w; ++t) {
    size_t begin = n * t / w;
    size_t end = n * (t + 1) / w;
    threads.emplace_back([&, begin, end, t] {
      try {
        fn(begin, end, static_cast<int>(t));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dupweight

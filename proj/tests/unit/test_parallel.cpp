#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "dupweight/parallel.hpp"

using namespace dupweight;

TEST_CASE("parallel_chunks covers [0,n) exactly once with fixed boundaries") {
  for (size_t n : {0ull, 1ull, 7ull, 64ull, 1000ull}) {
    for (int workers : {1, 2, 3, 8, 64}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_chunks(n, workers, [&](size_t begin, size_t end, int worker) {
        // Boundaries are the fixed n*t/w grid.
        size_t w = static_cast<size_t>(workers);
        if (w > n) w = n == 0 ? 1 : n;
        const size_t t = static_cast<size_t>(worker);
        CHECK(begin == n * t / w);
        CHECK(end == n * (t + 1) / w);
        for (size_t i = begin; i < end; ++i) hits[i].fetch_add(1);
      });
      for (size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
    }
  }
}

TEST_CASE("parallel_chunks runs inline for n == 0") {
  int calls = 0;
  parallel_chunks(0, 8, [&](size_t begin, size_t end, int worker) {
    ++calls;
    CHECK(begin == 0);
    CHECK(end == 0);
    CHECK(worker == 0);
  });
  CHECK(calls == 1);
}

TEST_CASE("parallel_chunks never uses more workers than items") {
  std::atomic<int> max_worker{-1};
  parallel_chunks(3, 16, [&](size_t, size_t, int worker) {
    int seen = max_worker.load();
    while (worker > seen && !max_worker.compare_exchange_weak(seen, worker)) {
    }
  });
  CHECK(max_worker.load() == 2);  // 3 items -> exactly 3 chunks
}

TEST_CASE("parallel_chunks rethrows a worker exception on the caller") {
  CHECK_THROWS_WITH_AS(
      parallel_chunks(100, 4,
                      [&](size_t begin, size_t, int) {
                        if (begin >= 50) throw std::runtime_error("worker boom");
                      }),
      "worker boom", std::runtime_error);
}

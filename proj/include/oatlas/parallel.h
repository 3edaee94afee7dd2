#ifndef OATLAS_PARALLEL_H_
#define OATLAS_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace oatlas {

// Runs fn(0) .. fn(n - 1) on at most `workers` threads. If any call throws,
// the exception of the lowest failing index is rethrown after all workers
// finish, so failures are reported deterministically.
template <typename Fn>
void ParallelFor(size_t n, unsigned workers, Fn &&fn) {
  if (n == 0) return;
  const size_t count = std::clamp<size_t>(workers, 1, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (count == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(count);
    for (size_t t = 0; t < count; ++t) threads.emplace_back(work);
    for (auto &t : threads) t.join();
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace oatlas

#endif  // OATLAS_PARALLEL_H_

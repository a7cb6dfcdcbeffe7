#include "sparsecov/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sparsecov {

void parallel_for(long count, int threads,
                  const std::function<void(long)>& body) {
  if (count <= 0) return;

  long workers = threads;
  if (workers <= 0) {
    workers = static_cast<long>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, count);

  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<long> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  long first_error_index = count;

  auto work = [&]() {
    for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (long w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sparsecov

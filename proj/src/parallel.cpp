#include "hitchin/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace hitchin {

namespace {

int env_cap() {
  const char* s = std::getenv("HITCHIN_SOV_THREADS");
  if (!s || !*s) return 0;
  try {
    return std::max(1, std::stoi(s));
  } catch (...) {
    return 0;
  }
}

}  // namespace

int worker_count(int requested) {
  const int cap = env_cap();
  int n = requested > 0 ? requested : (cap > 0 ? cap : static_cast<int>(std::thread::hardware_concurrency()));
  if (cap > 0) n = std::min(n, cap);
  return std::max(n, 1);
}

void parallel_for(int n, const std::function<void(int)>& f, int threads) {
  if (n <= 0) return;
  const int workers = std::min(worker_count(threads), n);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  auto run = [&](int i) {
    try {
      f(i);
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  };
  if (workers == 1) {
    for (int i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) run(i);
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hitchin

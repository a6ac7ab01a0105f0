#include "binfam/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace binfam {

std::size_t max_threads() {
  static const std::size_t cached = [] {
    const char* env = std::getenv("BINFAM_THREADS");
    if (!env) return std::size_t{1};
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 1) return std::size_t{1};
    return static_cast<std::size_t>(v);
  }();
  return cached;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += workers) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace binfam

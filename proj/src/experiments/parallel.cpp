#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "tccopula/experiments.hpp"
#include "tccopula/simulate.hpp"

namespace tccopula {

std::uint64_t replication_seed(std::uint64_t master, int n, std::size_t index) noexcept {
  const std::uint64_t base = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(n)));
  return splitmix64(base + static_cast<std::uint64_t>(index));
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count && !failed.load(); i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tccopula

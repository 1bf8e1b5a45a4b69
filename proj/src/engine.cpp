#include "cfkit/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace cfkit {
namespace {

std::string describe(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown exception";
  }
}

}  // namespace

std::string_view to_string(PassTarget target) {
  switch (target) {
    case PassTarget::kUsers:
      return "users";
    case PassTarget::kTestUsers:
      return "test users";
    case PassTarget::kItems:
      return "items";
    case PassTarget::kTestItems:
      return "test items";
  }
  return "unknown";
}

std::size_t target_size(const RatingsModel& model, PassTarget target) {
  switch (target) {
    case PassTarget::kUsers:
      return model.users.size();
    case PassTarget::kTestUsers:
      return model.test_users.size();
    case PassTarget::kItems:
      return model.items.size();
    case PassTarget::kTestItems:
      return model.test_items.size();
  }
  return 0;
}

std::size_t default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_pass(RatingsModel& model, PassTarget target, const ElementPass& pass,
              std::size_t workers) {
  if (workers == 0) throw ArgumentError("workers must be at least 1");
  if (!pass.per_element) throw ArgumentError("pass has no per-element action");

  if (pass.setup) pass.setup(model);

  const std::size_t n = target_size(model, target);
  const std::size_t threads = std::min(workers, std::max<std::size_t>(n, 1));

  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        pass.per_element(model, i);
      } catch (...) {
        throw PassError(target, i, describe(std::current_exception()));
      }
    }
  } else {
    const std::size_t chunk = std::max<std::size_t>(1, n / (8 * threads));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    std::optional<std::size_t> failed_index;
    std::exception_ptr failure;

    auto worker = [&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
          try {
            pass.per_element(model, i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            // Keep the lowest failing index seen.
            if (!failed_index || i < *failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
            return;
          }
        }
      }
    };

    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    if (failure) throw PassError(target, *failed_index, describe(failure));
  }

  if (pass.teardown) pass.teardown(model);
}

}  // namespace cfkit

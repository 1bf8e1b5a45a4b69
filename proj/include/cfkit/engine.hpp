#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "cfkit/datamodel.hpp"
#include "cfkit/error.hpp"

namespace cfkit {

enum class PassTarget { kUsers, kTestUsers, kItems, kTestItems };

std::string_view to_string(PassTarget target);
std::size_t target_size(const RatingsModel& model, PassTarget target);

// A three-phase unit of work over one entity array. `per_element` may run
// concurrently for different indices and must only write to the store of
// the element it was handed; `setup` and `teardown` run exclusively.
// Missing setup/teardown are skipped.
struct ElementPass {
  std::function<void(RatingsModel&)> setup;
  std::function<void(RatingsModel&, std::size_t)> per_element;
  std::function<void(RatingsModel&)> teardown;
};

// Raised when per_element throws. The pass is abandoned and teardown does
// not run.
class PassError : public Error {
 public:
  PassError(PassTarget target, std::size_t index, const std::string& cause)
      : Error(std::string(to_string(target)) + " pass failed at element " +
              std::to_string(index) + ": " + cause),
        target_(target),
        index_(index),
        cause_(cause) {}

  PassTarget target() const { return target_; }
  std::size_t index() const { return index_; }
  const std::string& cause() const { return cause_; }

 private:
  PassTarget target_;
  std::size_t index_;
  std::string cause_;
};

// Number of hardware threads, at least 1.
std::size_t default_workers();

// Runs setup, then per_element for every index of the target array, then
// teardown. Work is handed out in chunks of max(1, n / (8 * workers)) from a
// shared counter. With workers == 1 everything happens on the calling
// thread in ascending index order.
void run_pass(RatingsModel& model, PassTarget target, const ElementPass& pass,
              std::size_t workers);

}  // namespace cfkit

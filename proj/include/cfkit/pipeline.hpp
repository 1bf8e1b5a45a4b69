#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace cfkit {

// Store keys shared between pipeline steps.
inline constexpr const char* kSimilaritiesKey = "SIMILARITIES";
inline constexpr const char* kNeighborsKey = "NEIGHBORS";
inline constexpr const char* kPredictionsKey = "PREDICTIONS";

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

inline std::optional<double> defined_or_none(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

// Predicted ratings of one test entity, aligned with its test_ratings: entry
// p is the prediction for test_ratings[p]. NaN marks an undefined
// prediction.
struct PredictionVector {
  std::size_t owner = 0;
  std::vector<double> values;

  std::optional<double> at(std::size_t p) const {
    return defined_or_none(values.at(p));
  }
  std::size_t defined_count() const {
    std::size_t n = 0;
    for (double v : values) n += std::isnan(v) ? 0 : 1;
    return n;
  }
};

}  // namespace cfkit

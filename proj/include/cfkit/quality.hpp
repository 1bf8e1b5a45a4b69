#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfkit/datamodel.hpp"

namespace cfkit::quality {

// A measure averaged over test users (macro average). `value` is empty when
// no user contributed.
struct MeasureScore {
  std::string name;
  std::optional<double> value;
  std::size_t users_counted = 0;
  // Test users that had nothing to contribute.
  std::size_t users_excluded = 0;
};

struct PrecisionRecall {
  MeasureScore precision;
  MeasureScore recall;
  MeasureScore f1;
};

// All measures read the PREDICTIONS entry of every test user.

// Mean absolute error per user over defined predictions, then averaged over
// users with at least one defined prediction. With `normalize` the result
// is divided by the rating range.
MeasureScore measure_mae(RatingsModel& model, std::size_t workers,
                         bool normalize = false);

// Fraction of a user's test ratings that received a prediction, averaged
// over users with at least one test rating.
MeasureScore measure_coverage(RatingsModel& model, std::size_t workers);

// Top-`list_size` recommendations among each user's test items against the
// items rated at least `threshold`. F1 combines the averaged precision and
// recall.
PrecisionRecall measure_precision_recall(RatingsModel& model,
                                         std::size_t list_size,
                                         double threshold,
                                         std::size_t workers);

// Scores of one measure laid out as row key x column key, e.g. neighbor
// count x similarity metric.
class ResultsGrid {
 public:
  ResultsGrid(std::string measure_name, std::string row_name,
              std::vector<std::string> row_keys,
              std::vector<std::string> column_keys);

  // Throws BoundsError for keys not declared at construction.
  void put(const std::string& row, const std::string& column,
           std::optional<double> value);
  std::optional<double> at(const std::string& row,
                           const std::string& column) const;

  const std::string& measure_name() const { return measure_name_; }
  const std::string& row_name() const { return row_name_; }
  const std::vector<std::string>& row_keys() const { return row_keys_; }
  const std::vector<std::string>& column_keys() const { return column_keys_; }

  // Fixed-width table; empty cells print as "-".
  void print(std::ostream& out) const;
  // RFC 4180 CSV with CRLF line ends; values use the shortest text that
  // parses back to the same double.
  std::string to_csv() const;
  void export_csv(const std::string& path) const;

 private:
  std::size_t cell_index(const std::string& row,
                         const std::string& column) const;

  std::string measure_name_;
  std::string row_name_;
  std::vector<std::string> row_keys_;
  std::vector<std::string> column_keys_;
  std::vector<std::optional<double>> cells_;
};

// Shortest round-trip decimal text of v.
std::string format_shortest(double v);

}  // namespace cfkit::quality

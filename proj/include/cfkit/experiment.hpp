#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfkit/datamodel.hpp"
#include "cfkit/knn.hpp"
#include "cfkit/mf.hpp"
#include "cfkit/quality.hpp"

namespace cfkit {

enum class Measure { kMae, kCoverage, kPrecision, kRecall, kF1 };

std::string_view to_string(Measure measure);
std::optional<Measure> parse_measure(std::string_view name);

struct ExperimentConfig {
  std::string dataset_path;
  std::string separator = "::";
  double test_user_fraction = 0.2;
  double test_item_fraction = 0.2;
  std::uint64_t split_seed = 0;
  // 0 picks the number of hardware threads.
  std::size_t workers = 0;
  std::optional<double> min_rating;
  std::optional<double> max_rating;

  knn::Orientation orientation = knn::Orientation::kUserToUser;
  std::vector<knn::Metric> metrics;
  std::vector<std::size_t> neighbor_counts;
  knn::Aggregation aggregation = knn::Aggregation::kDeviationFromMean;

  mf::PmfParams pmf;

  std::vector<Measure> measures;
  // Recommendation list size and relevance threshold; required when a
  // precision, recall or F1 measure is selected.
  std::optional<std::size_t> list_size;
  std::optional<double> threshold;
  bool normalize_mae = false;

  // When set, grids are exported as CSV (see csv_path_for).
  std::string csv_path;

  std::size_t effective_workers() const;
};

// Throws ArgumentError describing the first problem found.
void validate_common(const ExperimentConfig& config);
void validate_knn(const ExperimentConfig& config);
void validate_mf(const ExperimentConfig& config);

struct LoadedModel {
  RatingsModel model;
  std::size_t duplicates = 0;
  std::size_t extra_fields = 0;
};

LoadedModel load_model(const ExperimentConfig& config);

// One grid per selected measure, in selection order. Rows are neighbor
// counts, columns metric names; every metric gets one similarity pass and
// every (metric, k) its own neighbor and aggregation passes.
std::vector<quality::ResultsGrid> run_knn_experiment(
    const ExperimentConfig& config, RatingsModel& model);
std::vector<quality::ResultsGrid> run_knn_experiment(
    const ExperimentConfig& config);

// One grid per measure with a single row (the epoch count) and a "PMF"
// column.
std::vector<quality::ResultsGrid> run_mf_experiment(
    const ExperimentConfig& config, RatingsModel& model);
std::vector<quality::ResultsGrid> run_mf_experiment(
    const ExperimentConfig& config);

void print_stats(std::ostream& out, const LoadedModel& loaded);

// The CSV file for one grid: `base` itself when a single grid is written,
// otherwise `base` with ".<MEASURE>" inserted before the extension.
std::string csv_path_for(const std::string& base, const std::string& measure,
                         std::size_t grid_count);

// Prints every grid and, when config.csv_path is set, exports them.
void emit_grids(std::ostream& out,
                const std::vector<quality::ResultsGrid>& grids,
                const ExperimentConfig& config);

}  // namespace cfkit

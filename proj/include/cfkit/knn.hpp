#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfkit/datamodel.hpp"
#include "cfkit/pipeline.hpp"

namespace cfkit::knn {

enum class Orientation { kUserToUser, kItemToItem };
enum class Metric { kPearson, kCosine, kMsd, kJmsd };
enum class Aggregation { kMean, kWeightedMean, kDeviationFromMean };

// Names used on the command line: COR, COSINE, MSD, JMSD.
std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);
// mean, wmean, dfm.
std::string_view to_string(Aggregation approach);
std::optional<Aggregation> parse_aggregation(std::string_view name);
// user, item.
std::string_view to_string(Orientation orientation);
std::optional<Orientation> parse_orientation(std::string_view name);

// Similarity of one test entity to every entity on the same axis. NaN marks
// UNDEFINED; the owner's own slot is always UNDEFINED.
struct SimilarityVector {
  std::size_t owner = 0;
  std::vector<double> values;

  std::optional<double> at(std::size_t other) const {
    return defined_or_none(values.at(other));
  }
};

// Up to k entity indices, by descending similarity then ascending index.
struct NeighborSet {
  std::size_t owner = 0;
  std::vector<std::uint32_t> neighbors;
};

// All metrics take two rating vectors sorted ascending by index and work on
// their common indices, found by a linear merge.

// Pearson correlation with means taken over the common items. Needs at least
// two common items and nonzero variance on both sides.
std::optional<double> pearson(std::span<const Rating> a,
                              std::span<const Rating> b);
std::optional<double> cosine(std::span<const Rating> a,
                             std::span<const Rating> b);
// 1 - mean squared difference of ratings rescaled to [0, 1] by `bounds`.
std::optional<double> msd(std::span<const Rating> a, std::span<const Rating> b,
                          RatingBounds bounds);
// Jaccard overlap of the two index sets times msd().
std::optional<double> jmsd(std::span<const Rating> a,
                           std::span<const Rating> b, RatingBounds bounds);

std::optional<double> similarity(Metric metric, std::span<const Rating> a,
                                 std::span<const Rating> b,
                                 RatingBounds bounds);

NeighborSet select_neighbors(const SimilarityVector& similarities,
                             std::size_t k);

// One neighbor's contribution to a single prediction.
struct NeighborRating {
  double similarity = 0.0;
  double rating = 0.0;
  // Neighbor's training rating average.
  double average = 0.0;
};

// Combines the neighbors that rated the target into a prediction, NaN when
// no neighbor qualifies. Weighted approaches ignore sim <= 0; deviation from
// mean is clamped to `bounds`.
double aggregate(Aggregation approach, double target_average,
                 std::span<const NeighborRating> contributions,
                 RatingBounds bounds);

// Fills SIMILARITIES for every test user (or test item).
void similarity_pass(RatingsModel& model, Orientation orientation,
                     Metric metric, std::size_t workers);

// Fills NEIGHBORS from SIMILARITIES.
void neighbors_pass(RatingsModel& model, Orientation orientation,
                    std::size_t k, std::size_t workers);

// Fills PREDICTIONS from NEIGHBORS. The item-to-item orientation writes the
// vectors onto test items and then mirrors them onto test users, so the
// quality measures always read test-user predictions.
void aggregation_pass(RatingsModel& model, Orientation orientation,
                      Aggregation approach, std::size_t workers);

// Similarity computed for `test_entity` against entity `other`, as stored by
// the last similarity pass.
std::optional<double> get_similarity(const TestProfile& test_entity,
                                     std::size_t other);

}  // namespace cfkit::knn

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfkit/store.hpp"

namespace cfkit {

// One line of a ratings file.
struct RatingTriple {
  std::string user_code;
  std::string item_code;
  double value = 0.0;

  bool operator==(const RatingTriple&) const = default;
};

// A rating seen from one side: `index` points into the other axis (an item
// index inside a user profile, a user index inside an item profile, or a
// test-entity index inside test ratings).
struct Rating {
  std::uint32_t index = 0;
  double value = 0.0;

  bool operator==(const Rating&) const = default;
};

struct RatingBounds {
  double min = 0.0;
  double max = 0.0;

  double span() const { return max - min; }
  double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
  bool operator==(const RatingBounds&) const = default;
};

// A user or an item with its training ratings, sorted ascending by the
// index of the rated (or rating) entity. Average and standard deviation are
// precomputed over those ratings; both are 0 for an empty profile.
struct EntityProfile {
  std::string code;
  std::size_t index = 0;
  std::vector<Rating> ratings;
  double rating_average = 0.0;
  double rating_stddev = 0.0;
  Store store;

  std::optional<double> rating_for(std::size_t other_index) const;
};

using UserProfile = EntityProfile;
using ItemProfile = EntityProfile;

// A test user (or test item). Its training ratings live on the matching
// entry of RatingsModel::users (items), found through `index`. Test ratings
// are keyed by the test index on the other axis: a test user's test_ratings
// point into RatingsModel::test_items.
struct TestProfile {
  std::size_t test_index = 0;
  std::size_t index = 0;
  std::vector<Rating> test_ratings;
  Store store;
};

using TestUserProfile = TestProfile;
using TestItemProfile = TestProfile;

class RatingsModel {
 public:
  std::vector<UserProfile> users;
  std::vector<ItemProfile> items;
  std::vector<TestUserProfile> test_users;
  std::vector<TestItemProfile> test_items;
  RatingBounds bounds;
  std::size_t num_ratings = 0;
  std::size_t num_test_ratings = 0;
  std::unordered_map<std::string, std::size_t> user_code_to_index;
  std::unordered_map<std::string, std::size_t> item_code_to_index;
  std::uint64_t split_seed = 0;

  // Training rating of user on item, looked up from the user side.
  std::optional<double> rating(std::size_t user_index,
                               std::size_t item_index) const;
  // Same lookup answered from the item side.
  std::optional<double> rating_from_item(std::size_t item_index,
                                         std::size_t user_index) const;

  const UserProfile& user_of(const TestUserProfile& tu) const {
    return users[tu.index];
  }
  const ItemProfile& item_of(const TestItemProfile& ti) const {
    return items[ti.index];
  }

  // Wipes every store. The ratings stay untouched.
  void clear_stores();
};

// Compares every data member of two models. Stores are excluded.
bool same_data(const RatingsModel& a, const RatingsModel& b);

struct LoadResult {
  std::vector<RatingTriple> triples;
  // Lines whose (user, item) pair was already seen; the later value won.
  std::size_t duplicates = 0;
  // Lines carrying a fourth field (e.g. a timestamp) that was dropped.
  std::size_t extra_fields = 0;
};

// Reads `user<sep>item<sep>rating` lines. Empty lines and lines starting
// with '#' are skipped. A duplicated (user, item) pair keeps the position of
// its first occurrence and the value of its last one.
LoadResult load_dataset(const std::string& path, const std::string& separator);
LoadResult parse_dataset(std::string_view text, const std::string& separator);

struct SplitOptions {
  double test_user_fraction = 0.0;
  double test_item_fraction = 0.0;
  std::uint64_t seed = 0;
  // Observed data bounds are used when unset.
  std::optional<double> min_rating;
  std::optional<double> max_rating;
};

// Builds the in-memory model. Users and items are indexed in lexicographic
// code order; floor(fraction * count) of each are drawn as test entities.
// A rating is held out iff both its user and its item are test entities.
RatingsModel build_model(std::span<const RatingTriple> triples,
                         const SplitOptions& options);

double mean_of(std::span<const Rating> ratings);
double stddev_of(std::span<const Rating> ratings, double mean);

}  // namespace cfkit

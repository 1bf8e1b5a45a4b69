#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cfkit/datamodel.hpp"
#include "oracle.hpp"

namespace cfkit::testing {

// Random sparse toy dataset of at most max_users x max_items with integer
// stars 1..5, sometimes half stars, and a few duplicated lines.
std::vector<RatingTriple> toy_triples(std::uint64_t seed,
                                      std::size_t max_users = 20,
                                      std::size_t max_items = 20);

// Every user rates every item; value = 1 + (u * 7 + i * 3) % 5.
std::vector<RatingTriple> full_grid(std::size_t users, std::size_t items);

// Sorted sparse profile over `columns` indices with values in [1, 5]
// (integer or half stars).
std::vector<Rating> random_profile(std::uint64_t seed, std::size_t columns);

// Model predictions laid out [user][item] like the oracle's.
oracle::Matrix predictions_matrix(const RatingsModel& model);

// Unique scratch file path under the system temp directory.
std::string temp_path(const std::string& name);

}  // namespace cfkit::testing

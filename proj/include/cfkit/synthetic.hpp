#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfkit/datamodel.hpp"

namespace cfkit {

// Parameters of a seeded MovieLens-shaped dataset: integer stars in
// [1, 5] generated from a low-rank taste model plus biases and noise.
struct SyntheticSpec {
  std::size_t users = 500;
  std::size_t items = 800;
  std::size_t ratings = 50000;
  std::size_t latent_factors = 4;
  std::uint64_t seed = 1;
};

// User codes are "1".."users", item codes "1".."items". Pairs are distinct.
std::vector<RatingTriple> synthetic_ratings(const SyntheticSpec& spec);

void write_ratings(std::ostream& out, const std::vector<RatingTriple>& triples,
                   const std::string& separator);
void write_ratings(const std::string& path,
                   const std::vector<RatingTriple>& triples,
                   const std::string& separator);

}  // namespace cfkit

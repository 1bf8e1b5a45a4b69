#include "cfkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "cfkit/error.hpp"
#include "cfkit/random.hpp"

namespace cfkit {

std::vector<RatingTriple> synthetic_ratings(const SyntheticSpec& spec) {
  const std::size_t cells = spec.users * spec.items;
  if (spec.ratings > cells) {
    throw ArgumentError("more ratings requested than user x item pairs");
  }
  Rng rng(spec.seed);
  const std::size_t f = std::max<std::size_t>(1, spec.latent_factors);
  auto symmetric = [&rng] { return 2.0 * rng.unit() - 1.0; };

  std::vector<double> user_taste(spec.users * f);
  std::vector<double> item_traits(spec.items * f);
  std::vector<double> user_bias(spec.users);
  std::vector<double> item_bias(spec.items);
  for (auto& x : user_taste) x = symmetric();
  for (auto& x : item_traits) x = symmetric();
  for (auto& x : user_bias) x = 0.6 * symmetric();
  for (auto& x : item_bias) x = 0.8 * symmetric();

  auto pairs = rng.sample(cells, spec.ratings);
  std::sort(pairs.begin(), pairs.end());

  std::vector<RatingTriple> triples;
  triples.reserve(pairs.size());
  for (const auto cell : pairs) {
    const std::size_t u = cell / spec.items;
    const std::size_t i = cell % spec.items;
    double affinity = 0.0;
    for (std::size_t k = 0; k < f; ++k) {
      affinity += user_taste[u * f + k] * item_traits[i * f + k];
    }
    const double raw = 3.2 + user_bias[u] + item_bias[i] +
                       3.0 * affinity / static_cast<double>(f) +
                       0.8 * symmetric();
    const double stars = std::clamp(std::round(raw), 1.0, 5.0);
    triples.push_back(
        {std::to_string(u + 1), std::to_string(i + 1), stars});
  }
  return triples;
}

void write_ratings(std::ostream& out, const std::vector<RatingTriple>& triples,
                   const std::string& separator) {
  for (const auto& t : triples) {
    out << t.user_code << separator << t.item_code << separator << t.value
        << '\n';
  }
}

void write_ratings(const std::string& path,
                   const std::vector<RatingTriple>& triples,
                   const std::string& separator) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot open file for writing");
  write_ratings(out, triples, separator);
  if (!out) throw IoError(path, "write failed");
}

}  // namespace cfkit

#include "fixtures.hpp"

#include <atomic>
#include <filesystem>

#include "cfkit/pipeline.hpp"
#include "cfkit/random.hpp"

#include <unistd.h>

namespace cfkit::testing {

std::vector<RatingTriple> toy_triples(std::uint64_t seed,
                                      std::size_t max_users,
                                      std::size_t max_items) {
  Rng rng(seed);
  const std::size_t users = 4 + rng.below(max_users - 3);
  const std::size_t items = 4 + rng.below(max_items - 3);
  const double density = 0.35 + 0.55 * rng.unit();
  const bool half_stars = rng.below(3) == 0;

  std::vector<RatingTriple> out;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      if (rng.unit() >= density) continue;
      double v = 1.0 + static_cast<double>(rng.below(5));
      if (half_stars && v < 5.0 && rng.below(2) == 0) v += 0.5;
      out.push_back({"u" + std::to_string(u), "i" + std::to_string(i), v});
    }
  }
  // A couple of repeated lines; the later value must win.
  for (int d = 0; d < 2 && !out.empty(); ++d) {
    auto t = out[rng.below(out.size())];
    t.value = 1.0 + static_cast<double>(rng.below(5));
    out.push_back(t);
  }
  return out;
}

std::vector<RatingTriple> full_grid(std::size_t users, std::size_t items) {
  std::vector<RatingTriple> out;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      out.push_back({"u" + std::to_string(u), "i" + std::to_string(i),
                     1.0 + static_cast<double>((u * 7 + i * 3) % 5)});
    }
  }
  return out;
}

std::vector<Rating> random_profile(std::uint64_t seed, std::size_t columns) {
  Rng rng(seed);
  const double density = 0.2 + 0.7 * rng.unit();
  std::vector<Rating> out;
  for (std::size_t c = 0; c < columns; ++c) {
    if (rng.unit() >= density) continue;
    const double v = 1.0 + 0.5 * static_cast<double>(rng.below(9));
    out.push_back({static_cast<std::uint32_t>(c), v});
  }
  return out;
}

oracle::Matrix predictions_matrix(const RatingsModel& model) {
  oracle::Matrix m(model.users.size(), oracle::Row(model.items.size()));
  for (const auto& tu : model.test_users) {
    const auto* pv = tu.store.get<PredictionVector>(kPredictionsKey);
    if (!pv) continue;
    for (std::size_t p = 0; p < tu.test_ratings.size(); ++p) {
      const auto item = model.test_items[tu.test_ratings[p].index].index;
      m[tu.index][item] = pv->at(p);
    }
  }
  return m;
}

std::string temp_path(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  return (dir / ("cfkit_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++) + "_" + name))
      .string();
}

}  // namespace cfkit::testing

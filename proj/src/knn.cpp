#include "cfkit/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfkit/engine.hpp"
#include "cfkit/error.hpp"

namespace cfkit::knn {
namespace {

// Calls f(a_value, b_value) for each common index, in ascending order.
// Returns the number of common indices.
template <typename F>
std::size_t for_each_common(std::span<const Rating> a,
                            std::span<const Rating> b, F&& f) {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      f(a[i].value, b[j].value);
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

struct Axis {
  std::vector<EntityProfile>* entities;
  std::vector<TestProfile>* tests;
  PassTarget target;
};

Axis axis_of(RatingsModel& model, Orientation orientation) {
  if (orientation == Orientation::kUserToUser) {
    return {&model.users, &model.test_users, PassTarget::kTestUsers};
  }
  return {&model.items, &model.test_items, PassTarget::kTestItems};
}

void require_key(const std::vector<TestProfile>& tests, const char* key,
                 const char* step) {
  for (const auto& t : tests) {
    if (!t.store.contains(key)) throw PipelineOrderError(key, step);
  }
}

std::size_t position_of(const std::vector<Rating>& ratings,
                        std::size_t index) {
  auto it = std::lower_bound(
      ratings.begin(), ratings.end(), index,
      [](const Rating& r, std::size_t idx) { return r.index < idx; });
  return static_cast<std::size_t>(it - ratings.begin());
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kPearson:
      return "COR";
    case Metric::kCosine:
      return "COSINE";
    case Metric::kMsd:
      return "MSD";
    case Metric::kJmsd:
      return "JMSD";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (auto m : {Metric::kPearson, Metric::kCosine, Metric::kMsd,
                 Metric::kJmsd}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Aggregation approach) {
  switch (approach) {
    case Aggregation::kMean:
      return "mean";
    case Aggregation::kWeightedMean:
      return "wmean";
    case Aggregation::kDeviationFromMean:
      return "dfm";
  }
  return "?";
}

std::optional<Aggregation> parse_aggregation(std::string_view name) {
  for (auto a : {Aggregation::kMean, Aggregation::kWeightedMean,
                 Aggregation::kDeviationFromMean}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::kUserToUser ? "user" : "item";
}

std::optional<Orientation> parse_orientation(std::string_view name) {
  if (name == "user") return Orientation::kUserToUser;
  if (name == "item") return Orientation::kItemToItem;
  return std::nullopt;
}

std::optional<double> pearson(std::span<const Rating> a,
                              std::span<const Rating> b) {
  double sum_a = 0.0;
  double sum_b = 0.0;
  const std::size_t n = for_each_common(a, b, [&](double x, double y) {
    sum_a += x;
    sum_b += y;
  });
  if (n < 2) return std::nullopt;
  const double mean_a = sum_a / static_cast<double>(n);
  const double mean_b = sum_b / static_cast<double>(n);

  double num = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for_each_common(a, b, [&](double x, double y) {
    const double da = x - mean_a;
    const double db = y - mean_b;
    num += da * db;
    var_a += da * da;
    var_b += db * db;
  });
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
  return clamp_unit(num / std::sqrt(var_a * var_b));
}

std::optional<double> cosine(std::span<const Rating> a,
                             std::span<const Rating> b) {
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  const std::size_t n = for_each_common(a, b, [&](double x, double y) {
    dot += x * y;
    norm_a += x * x;
    norm_b += y * y;
  });
  if (n == 0 || norm_a == 0.0 || norm_b == 0.0) return std::nullopt;
  return clamp_unit(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)));
}

std::optional<double> msd(std::span<const Rating> a, std::span<const Rating> b,
                          RatingBounds bounds) {
  const double range = bounds.span();
  double sum = 0.0;
  const std::size_t n = for_each_common(a, b, [&](double x, double y) {
    if (range == 0.0) return;
    const double d = (x - bounds.min) / range - (y - bounds.min) / range;
    sum += d * d;
  });
  if (n == 0) return std::nullopt;
  return 1.0 - sum / static_cast<double>(n);
}

std::optional<double> jmsd(std::span<const Rating> a,
                           std::span<const Rating> b, RatingBounds bounds) {
  const auto m = msd(a, b, bounds);
  if (!m) return std::nullopt;
  const std::size_t common = for_each_common(a, b, [](double, double) {});
  const double jaccard =
      static_cast<double>(common) /
      static_cast<double>(a.size() + b.size() - common);
  return jaccard * *m;
}

std::optional<double> similarity(Metric metric, std::span<const Rating> a,
                                 std::span<const Rating> b,
                                 RatingBounds bounds) {
  switch (metric) {
    case Metric::kPearson:
      return pearson(a, b);
    case Metric::kCosine:
      return cosine(a, b);
    case Metric::kMsd:
      return msd(a, b, bounds);
    case Metric::kJmsd:
      return jmsd(a, b, bounds);
  }
  return std::nullopt;
}

NeighborSet select_neighbors(const SimilarityVector& similarities,
                             std::size_t k) {
  NeighborSet result;
  result.owner = similarities.owner;
  const auto& sims = similarities.values;
  std::vector<std::uint32_t> candidates;
  candidates.reserve(sims.size());
  for (std::size_t v = 0; v < sims.size(); ++v) {
    if (!std::isnan(sims[v])) candidates.push_back(static_cast<std::uint32_t>(v));
  }
  const auto better = [&sims](std::uint32_t x, std::uint32_t y) {
    if (sims[x] != sims[y]) return sims[x] > sims[y];
    return x < y;
  };
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), better);
  candidates.resize(keep);
  result.neighbors = std::move(candidates);
  return result;
}

double aggregate(Aggregation approach, double target_average,
                 std::span<const NeighborRating> contributions,
                 RatingBounds bounds) {
  switch (approach) {
    case Aggregation::kMean: {
      if (contributions.empty()) return kUndefined;
      double sum = 0.0;
      for (const auto& c : contributions) sum += c.rating;
      return bounds.clamp(sum / static_cast<double>(contributions.size()));
    }
    case Aggregation::kWeightedMean: {
      double num = 0.0;
      double den = 0.0;
      for (const auto& c : contributions) {
        if (c.similarity <= 0.0) continue;
        num += c.similarity * c.rating;
        den += c.similarity;
      }
      if (den == 0.0) return kUndefined;
      return bounds.clamp(num / den);
    }
    case Aggregation::kDeviationFromMean: {
      double num = 0.0;
      double den = 0.0;
      for (const auto& c : contributions) {
        if (c.similarity <= 0.0) continue;
        num += c.similarity * (c.rating - c.average);
        den += c.similarity;
      }
      if (den == 0.0) return kUndefined;
      return bounds.clamp(target_average + num / den);
    }
  }
  return kUndefined;
}

void similarity_pass(RatingsModel& model, Orientation orientation,
                     Metric metric, std::size_t workers) {
  const Axis axis = axis_of(model, orientation);
  ElementPass pass;
  pass.per_element = [axis, metric](RatingsModel& m, std::size_t t) {
    TestProfile& test = (*axis.tests)[t];
    const auto& entities = *axis.entities;
    const auto& own = entities[test.index].ratings;
    SimilarityVector sv;
    sv.owner = t;
    sv.values.assign(entities.size(), kUndefined);
    for (std::size_t v = 0; v < entities.size(); ++v) {
      if (v == test.index) continue;
      const auto s = similarity(metric, own, entities[v].ratings, m.bounds);
      if (s) sv.values[v] = *s;
    }
    test.store.put(kSimilaritiesKey, std::move(sv));
  };
  run_pass(model, axis.target, pass, workers);
}

void neighbors_pass(RatingsModel& model, Orientation orientation,
                    std::size_t k, std::size_t workers) {
  if (k == 0) throw ArgumentError("k must be positive");
  const Axis axis = axis_of(model, orientation);
  ElementPass pass;
  pass.setup = [axis](RatingsModel&) {
    require_key(*axis.tests, kSimilaritiesKey, "similarity");
  };
  pass.per_element = [axis, k](RatingsModel&, std::size_t t) {
    TestProfile& test = (*axis.tests)[t];
    const auto* sv = test.store.get<SimilarityVector>(kSimilaritiesKey);
    test.store.put(kNeighborsKey, select_neighbors(*sv, k));
  };
  run_pass(model, axis.target, pass, workers);
}

void aggregation_pass(RatingsModel& model, Orientation orientation,
                      Aggregation approach, std::size_t workers) {
  const Axis axis = axis_of(model, orientation);
  // Test ratings of a test user point at test items and vice versa; this is
  // the array that maps them back to entity indices.
  const std::vector<TestProfile>* counterpart =
      orientation == Orientation::kUserToUser ? &model.test_items
                                              : &model.test_users;

  ElementPass pass;
  pass.setup = [axis](RatingsModel&) {
    require_key(*axis.tests, kSimilaritiesKey, "similarity");
    require_key(*axis.tests, kNeighborsKey, "neighbors");
  };
  pass.per_element = [axis, counterpart, approach](RatingsModel& m,
                                                   std::size_t t) {
    TestProfile& test = (*axis.tests)[t];
    const auto& entities = *axis.entities;
    const auto* sv = test.store.get<SimilarityVector>(kSimilaritiesKey);
    const auto* ns = test.store.get<NeighborSet>(kNeighborsKey);
    const double target_average = entities[test.index].rating_average;

    PredictionVector pv;
    pv.owner = t;
    pv.values.reserve(test.test_ratings.size());
    std::vector<NeighborRating> contributions;
    for (const auto& tr : test.test_ratings) {
      const std::size_t target = (*counterpart)[tr.index].index;
      contributions.clear();
      for (const auto v : ns->neighbors) {
        const auto r = entities[v].rating_for(target);
        if (!r) continue;
        contributions.push_back(
            {sv->values[v], *r, entities[v].rating_average});
      }
      pv.values.push_back(
          aggregate(approach, target_average, contributions, m.bounds));
    }
    test.store.put(kPredictionsKey, std::move(pv));
  };
  if (orientation == Orientation::kItemToItem) {
    pass.teardown = [](RatingsModel& m) {
      for (auto& tu : m.test_users) {
        PredictionVector pv;
        pv.owner = tu.test_index;
        pv.values.reserve(tu.test_ratings.size());
        for (const auto& tr : tu.test_ratings) {
          const TestProfile& ti = m.test_items[tr.index];
          const auto* item_pv = ti.store.get<PredictionVector>(kPredictionsKey);
          pv.values.push_back(
              item_pv->values[position_of(ti.test_ratings, tu.test_index)]);
        }
        tu.store.put(kPredictionsKey, std::move(pv));
      }
    };
  }
  run_pass(model, axis.target, pass, workers);
}

std::optional<double> get_similarity(const TestProfile& test_entity,
                                     std::size_t other) {
  const auto* sv = test_entity.store.get<SimilarityVector>(kSimilaritiesKey);
  if (!sv) throw PipelineOrderError(kSimilaritiesKey, "similarity");
  if (other >= sv->values.size()) {
    throw BoundsError("similarity index " + std::to_string(other) +
                      " out of range");
  }
  return sv->at(other);
}

}  // namespace cfkit::knn

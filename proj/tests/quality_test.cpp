#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "cfkit/error.hpp"
#include "cfkit/knn.hpp"
#include "cfkit/pipeline.hpp"
#include "cfkit/quality.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

namespace cfkit::quality {
namespace {

// Every rating becomes a test rating; bounds fixed to [1, 5].
RatingsModel all_test(const std::vector<RatingTriple>& triples) {
  SplitOptions o{1.0, 1.0, 0, 1.0, 5.0};
  return build_model(triples, o);
}

void set_predictions(RatingsModel& m, std::size_t test_user,
                     std::vector<double> values) {
  auto& tu = m.test_users[test_user];
  ASSERT_EQ(values.size(), tu.test_ratings.size());
  tu.store.put(kPredictionsKey, PredictionVector{test_user, std::move(values)});
}

TEST(Mae, PerfectPredictionsScoreZero) {
  auto m = all_test({{"a", "i1", 4}, {"a", "i2", 2}, {"b", "i1", 3}});
  set_predictions(m, 0, {4, 2});
  set_predictions(m, 1, {3});
  auto s = measure_mae(m, 1);
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(s.users_counted, 2u);
}

TEST(Mae, AveragesPerUserErrors) {
  auto m = all_test({{"a", "i1", 4}, {"a", "i2", 2}, {"b", "i1", 3},
                     {"b", "i2", 1}});
  set_predictions(m, 0, {4.5, 1.5});  // mean error 0.5
  set_predictions(m, 1, {4.0, 3.0});  // mean error 1.5
  EXPECT_EQ(measure_mae(m, 2).value, 1.0);
  EXPECT_EQ(measure_mae(m, 2, true).value, 0.25);
}

TEST(Mae, UndefinedEverywhere) {
  auto m = all_test({{"a", "i1", 4}, {"b", "i2", 2}});
  set_predictions(m, 0, {kUndefined});
  set_predictions(m, 1, {kUndefined});
  auto s = measure_mae(m, 1);
  EXPECT_FALSE(s.value);
  EXPECT_EQ(s.users_counted, 0u);
  EXPECT_EQ(s.users_excluded, 2u);
}

TEST(Mae, Errors) {
  auto none = build_model(testing::full_grid(4, 4), {0.0, 0.5, 1});
  EXPECT_THROW(measure_mae(none, 1), EmptyTestSetError);
  auto m = all_test({{"a", "i1", 4}});
  EXPECT_THROW(measure_mae(m, 1), PipelineOrderError);
}

TEST(Coverage, Fractions) {
  auto m = all_test({{"a", "i1", 4}, {"a", "i2", 2}, {"a", "i3", 5},
                     {"a", "i4", 1}});
  set_predictions(m, 0, {3, kUndefined, 4, 2});
  EXPECT_EQ(measure_coverage(m, 1).value, 0.75);
  set_predictions(m, 0, {3, 1, 4, 2});
  EXPECT_EQ(measure_coverage(m, 1).value, 1.0);
  // With full coverage, recommending everything at the lowest threshold
  // recalls every test item.
  auto pr = measure_precision_recall(m, 1000, m.bounds.min, 1);
  EXPECT_EQ(pr.recall.value, 1.0);
}

TEST(Coverage, KnnWithAllNeighborsOnDenseModel) {
  auto m = build_model(testing::full_grid(12, 10), {0.5, 0.5, 4});
  using namespace knn;
  similarity_pass(m, Orientation::kUserToUser, Metric::kMsd, 1);
  neighbors_pass(m, Orientation::kUserToUser, m.users.size(), 1);
  aggregation_pass(m, Orientation::kUserToUser, Aggregation::kMean, 1);
  EXPECT_EQ(measure_coverage(m, 1).value, 1.0);
}

TEST(PrecisionRecall, HandEnumeratedExample) {
  auto m = all_test({{"a", "i1", 5}, {"a", "i2", 4}, {"a", "i3", 2}});
  set_predictions(m, 0, {4.5, 3.8, 4.2});
  auto pr = measure_precision_recall(m, 2, 4.0, 1);
  EXPECT_EQ(pr.precision.value, 0.5);
  EXPECT_EQ(pr.recall.value, 0.5);
  EXPECT_EQ(pr.f1.value, 0.5);
}

TEST(PrecisionRecall, AllRecommendedRelevant) {
  auto m = all_test({{"a", "i1", 5}, {"a", "i2", 4}, {"a", "i3", 2}});
  set_predictions(m, 0, {4.5, 4.4, 1.0});
  auto pr = measure_precision_recall(m, 2, 4.0, 1);
  EXPECT_EQ(pr.precision.value, 1.0);
  EXPECT_EQ(pr.recall.value, 1.0);
}

TEST(PrecisionRecall, NoRelevantItems) {
  auto m = all_test({{"a", "i1", 2}, {"a", "i2", 1}, {"b", "i1", 5}});
  set_predictions(m, 0, {4.5, 3.0});
  set_predictions(m, 1, {kUndefined});
  auto pr = measure_precision_recall(m, 1, 5.0, 1);
  // a: precision 0, no relevant items. b: nothing recommended, recall 0.
  EXPECT_EQ(pr.precision.value, 0.0);
  EXPECT_EQ(pr.precision.users_counted, 1u);
  EXPECT_EQ(pr.recall.value, 0.0);
  EXPECT_EQ(pr.recall.users_counted, 1u);
  EXPECT_EQ(pr.f1.value, 0.0);
}

TEST(PrecisionRecall, RecallUndefinedWithoutRelevantItems) {
  auto lone = all_test({{"a", "i1", 2}, {"a", "i2", 1}});
  set_predictions(lone, 0, {4.5, 3.0});
  auto r = measure_precision_recall(lone, 1, 4.0, 1);
  EXPECT_FALSE(r.recall.value);
  EXPECT_EQ(r.recall.users_counted, 0u);
  EXPECT_FALSE(r.f1.value);
}

TEST(PrecisionRecall, TiesBreakByItemIndex) {
  auto m = all_test({{"a", "i1", 1}, {"a", "i2", 5}, {"a", "i3", 5}});
  set_predictions(m, 0, {4.0, 4.0, 4.0});
  auto pr = measure_precision_recall(m, 1, 4.0, 1);
  EXPECT_EQ(pr.precision.value, 0.0);  // i1 wins the tie and is irrelevant
}

TEST(PrecisionRecall, ArgumentChecks) {
  auto m = all_test({{"a", "i1", 1}, {"a", "i2", 5}});
  set_predictions(m, 0, {4.0, 4.0});
  EXPECT_THROW(measure_precision_recall(m, 0, 4.0, 1), ArgumentError);
  EXPECT_THROW(measure_precision_recall(m, 2, 0.5, 1), ArgumentError);
  EXPECT_THROW(measure_precision_recall(m, 2, 5.5, 1), ArgumentError);
}

TEST(Measures, MatchBruteForceOnToyModels) {
  using namespace knn;
  for (std::uint64_t seed = 200; seed < 215; ++seed) {
    const auto triples = testing::toy_triples(seed);
    auto m = build_model(triples, {0.5, 0.5, seed});
    if (m.test_users.empty()) continue;
    const auto dense = oracle::dense_split(triples, m);
    similarity_pass(m, Orientation::kUserToUser, Metric::kPearson, 2);
    neighbors_pass(m, Orientation::kUserToUser, 5, 2);
    aggregation_pass(m, Orientation::kUserToUser, Aggregation::kWeightedMean, 2);
    const auto preds = testing::predictions_matrix(m);

    auto expect_close = [](std::optional<double> got, std::optional<double> want) {
      ASSERT_EQ(got.has_value(), want.has_value());
      if (want) EXPECT_NEAR(*got, *want, 1e-12);
    };
    expect_close(measure_mae(m, 3).value, oracle::mae(dense, preds));
    expect_close(measure_coverage(m, 3).value, oracle::coverage(dense, preds));
    for (std::size_t n : {1u, 3u, 10u}) {
      for (double theta : {m.bounds.min, 3.0, m.bounds.max}) {
        auto pr = measure_precision_recall(m, n, theta, 3);
        auto want = oracle::precision_recall(dense, preds, n, theta);
        expect_close(pr.precision.value, want.precision);
        expect_close(pr.recall.value, want.recall);
      }
    }
    // Recommending every predicted item at the lowest threshold recalls
    // exactly the covered fraction.
    auto all = measure_precision_recall(m, 1000, m.bounds.min, 1);
    expect_close(all.recall.value, measure_coverage(m, 1).value);
  }
}

TEST(ResultsGrid, PutReadAndUnknownKeys) {
  ResultsGrid g("MAE", "k", {"50", "100"}, {"COR", "JMSD"});
  g.put("100", "JMSD", 0.75);
  EXPECT_EQ(g.at("100", "JMSD"), 0.75);
  EXPECT_EQ(g.at("50", "COR"), std::nullopt);
  EXPECT_THROW(g.put("75", "COR", 1.0), BoundsError);
  EXPECT_THROW(g.at("50", "COSINE"), BoundsError);
}

TEST(ResultsGrid, PrintsTitleHeaderAndRows) {
  std::vector<std::string> rows;
  for (int k = 50; k <= 400; k += 50) rows.push_back(std::to_string(k));
  ResultsGrid g("MAE", "k", rows, {"COR", "JMSD"});
  g.put("50", "COR", 0.8123456);
  std::ostringstream out;
  g.print(out);
  const auto text = out.str();
  EXPECT_NE(text.find("0.812346"), std::string::npos);
  EXPECT_NE(text.find("COR"), std::string::npos);
  EXPECT_NE(text.find("-"), std::string::npos);
  // Title, header and one line per k.
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
}

TEST(ResultsGrid, CsvParsesBackExactly) {
  ResultsGrid g("MAE", "k", {"50", "100", "150"}, {"COR", "JMSD", "a,b"});
  g.put("50", "COR", 0.1 + 0.2);
  g.put("50", "JMSD", 1.0 / 3.0);
  g.put("100", "COR", 0.7766124958227063);
  g.put("150", "a,b", 1e-17);
  const auto csv = g.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "k,COR,JMSD,\"a,b\"");

  // Parse the body back: split on CRLF, then commas (no quoted body cells).
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = csv.find("\r\n") + 2;
  while (pos < csv.size()) {
    const auto end = csv.find("\r\n", pos);
    std::string line = csv.substr(pos, end - pos);
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(cells);
    pos = end + 2;
  }
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    ASSERT_EQ(rows[r].size(), 4u);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto want = g.at(g.row_keys()[r], g.column_keys()[c]);
      const auto& cell = rows[r][c + 1];
      if (!want) {
        EXPECT_TRUE(cell.empty());
        continue;
      }
      double parsed = 0;
      std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
      EXPECT_EQ(parsed, *want);
    }
  }
}

}  // namespace
}  // namespace cfkit::quality

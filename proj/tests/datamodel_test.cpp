#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "cfkit/datamodel.hpp"
#include "cfkit/error.hpp"
#include "support/fixtures.hpp"

namespace cfkit {
namespace {

using Cell = std::tuple<std::string, std::string, double>;

std::multiset<Cell> user_side(const RatingsModel& m) {
  std::multiset<Cell> out;
  for (const auto& u : m.users) {
    for (const auto& r : u.ratings) {
      out.insert({u.code, m.items[r.index].code, r.value});
    }
  }
  return out;
}

std::multiset<Cell> item_side(const RatingsModel& m) {
  std::multiset<Cell> out;
  for (const auto& i : m.items) {
    for (const auto& r : i.ratings) {
      out.insert({m.users[r.index].code, i.code, r.value});
    }
  }
  return out;
}

std::multiset<Cell> test_side(const RatingsModel& m) {
  std::multiset<Cell> out;
  for (const auto& tu : m.test_users) {
    for (const auto& r : tu.test_ratings) {
      out.insert({m.users[tu.index].code,
                  m.items[m.test_items[r.index].index].code, r.value});
    }
  }
  return out;
}

TEST(LoadDataset, ParsesSeparatedTriple) {
  auto r = parse_dataset("1::10::4.0\n", "::");
  ASSERT_EQ(r.triples.size(), 1u);
  EXPECT_EQ(r.triples[0], (RatingTriple{"1", "10", 4.0}));
}

TEST(LoadDataset, EmptyInputGivesNoTriples) {
  EXPECT_TRUE(parse_dataset("", "::").triples.empty());
  EXPECT_TRUE(parse_dataset("\n\n  \n", "::").triples.empty());
}

TEST(LoadDataset, MissingFieldReportsLine) {
  try {
    parse_dataset("1::10\n", "::");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse_dataset("1::10::3\n# note\n\n2::x::abc\n", "::");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(LoadDataset, RejectsTooManyFieldsAndNonFinite) {
  EXPECT_THROW(parse_dataset("1,2,3,4,5\n", ","), ParseError);
  EXPECT_THROW(parse_dataset("1,2,nan\n", ","), ParseError);
  EXPECT_THROW(parse_dataset("1,2,inf\n", ","), ParseError);
  EXPECT_THROW(parse_dataset("1,2,4x\n", ","), ParseError);
  EXPECT_THROW(parse_dataset("1,2,3\n", ""), ArgumentError);
}

TEST(LoadDataset, SkipsCommentsAndCountsTimestamps) {
  auto r = parse_dataset("# header\r\n1\t5\t3\t881250949\r\n2\t5\t4\r\n", "\t");
  ASSERT_EQ(r.triples.size(), 2u);
  EXPECT_EQ(r.extra_fields, 1u);
  EXPECT_EQ(r.triples[1], (RatingTriple{"2", "5", 4.0}));
}

TEST(LoadDataset, LastDuplicateWins) {
  auto r = parse_dataset("a::x::1\nb::x::2\na::x::5\n", "::");
  ASSERT_EQ(r.triples.size(), 2u);
  EXPECT_EQ(r.duplicates, 1u);
  EXPECT_EQ(r.triples[0], (RatingTriple{"a", "x", 5.0}));
  EXPECT_EQ(r.triples[1], (RatingTriple{"b", "x", 2.0}));
}

TEST(LoadDataset, ReadsFileAndReportsMissingPath) {
  const auto path = testing::temp_path("ratings.dat");
  {
    std::ofstream out(path);
    out << "1::10::4.0\n2::10::3.5\n";
  }
  auto r = load_dataset(path, "::");
  EXPECT_EQ(r.triples.size(), 2u);
  std::remove(path.c_str());

  try {
    load_dataset("/nonexistent/ratings.dat", "::");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/ratings.dat");
  }
}

TEST(BuildModel, FullGridHalfSplitHoldsOutAQuarter) {
  const auto triples = testing::full_grid(10, 10);
  for (std::uint64_t seed : {0u, 1u, 7u, 12345u}) {
    auto m = build_model(triples, {0.5, 0.5, seed});
    // Enumerate every cell and count those with both endpoints in test.
    std::size_t both = 0;
    std::vector<bool> tu(10), ti(10);
    for (const auto& t : m.test_users) tu[t.index] = true;
    for (const auto& t : m.test_items) ti[t.index] = true;
    for (std::size_t u = 0; u < 10; ++u) {
      for (std::size_t i = 0; i < 10; ++i) both += tu[u] && ti[i];
    }
    EXPECT_EQ(both, 25u);
    EXPECT_EQ(m.num_test_ratings, 25u);
    EXPECT_EQ(m.num_ratings, 75u);
  }
}

TEST(BuildModel, TwentyPercentSplitSizes) {
  auto m = build_model(testing::full_grid(15, 20), {0.2, 0.2, 3});
  EXPECT_EQ(m.test_users.size(), 3u);
  EXPECT_EQ(m.test_items.size(), 4u);
  EXPECT_EQ(m.num_test_ratings, 12u);
}

TEST(BuildModel, ZeroFractionMeansNoTests) {
  auto m = build_model(testing::full_grid(6, 6), {0.0, 0.5, 3});
  EXPECT_TRUE(m.test_users.empty());
  EXPECT_EQ(m.num_test_ratings, 0u);
  EXPECT_EQ(m.num_ratings, 36u);
}

TEST(BuildModel, Errors) {
  std::vector<RatingTriple> none;
  EXPECT_THROW(build_model(none, {0.2, 0.2, 1}), EmptyDatasetError);
  auto grid = testing::full_grid(3, 3);
  EXPECT_THROW(build_model(grid, {1.5, 0.2, 1}), ArgumentError);
  EXPECT_THROW(build_model(grid, {0.2, -0.1, 1}), ArgumentError);
  SplitOptions tight{0.2, 0.2, 1, 2.0, 4.0};
  EXPECT_THROW(build_model(grid, tight), DataError);
}

TEST(BuildModel, IndicesFollowLexicographicCodes) {
  std::vector<RatingTriple> t{{"10", "b", 1}, {"2", "a", 2}, {"1", "c", 3}};
  auto m = build_model(t, {0, 0, 0});
  ASSERT_EQ(m.users.size(), 3u);
  EXPECT_EQ(m.users[0].code, "1");
  EXPECT_EQ(m.users[1].code, "10");
  EXPECT_EQ(m.users[2].code, "2");
  EXPECT_EQ(m.item_code_to_index.at("c"), 2u);
  EXPECT_EQ(m.bounds, (RatingBounds{1, 3}));
}

TEST(BuildModel, BoundsOverride) {
  SplitOptions o{0, 0, 0, 1.0, 5.0};
  auto m = build_model(testing::full_grid(2, 2), o);
  EXPECT_EQ(m.bounds, (RatingBounds{1, 5}));
}

TEST(GetRating, LookupFromBothSides) {
  std::vector<RatingTriple> t{{"a", "x", 4}, {"a", "y", 2}, {"b", "y", 5}};
  auto m = build_model(t, {0, 0, 0});
  EXPECT_EQ(m.rating(0, 0), 4.0);
  EXPECT_EQ(m.rating(1, 0), std::nullopt);
  EXPECT_EQ(m.rating_from_item(1, 1), 5.0);
  EXPECT_THROW(m.rating(2, 0), BoundsError);
  EXPECT_THROW(m.rating_from_item(0, 9), BoundsError);
}

TEST(GetRating, UserAndItemSidesAgreeEverywhere) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto m = build_model(testing::toy_triples(seed), {0.3, 0.3, seed});
    for (std::size_t u = 0; u < m.users.size(); ++u) {
      for (std::size_t i = 0; i < m.items.size(); ++i) {
        ASSERT_EQ(m.rating(u, i), m.rating_from_item(i, u));
      }
    }
  }
}

TEST(Store, PutGetOverwrite) {
  Store s;
  EXPECT_EQ(s.get<int>("SIMILARITIES"), nullptr);
  s.put("SIMILARITIES", std::vector<double>{0.5, 0.25});
  ASSERT_NE(s.get<std::vector<double>>("SIMILARITIES"), nullptr);
  EXPECT_EQ(*s.get<std::vector<double>>("SIMILARITIES"),
            (std::vector<double>{0.5, 0.25}));
  s.put("SIMILARITIES", std::vector<double>{1.0});
  EXPECT_EQ(s.get<std::vector<double>>("SIMILARITIES")->size(), 1u);
  EXPECT_EQ(s.get<int>("SIMILARITIES"), nullptr);
}

TEST(ModelInvariants, HoldOnRandomToyModels) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto triples = testing::toy_triples(seed);
    const auto m = build_model(triples, {0.4, 0.4, seed});

    EXPECT_EQ(user_side(m), item_side(m));

    // De-duplicated input (last wins) equals train + test, disjointly.
    std::map<std::pair<std::string, std::string>, double> unique;
    for (const auto& t : triples) unique[{t.user_code, t.item_code}] = t.value;
    std::multiset<Cell> expected;
    for (const auto& [k, v] : unique) expected.insert({k.first, k.second, v});
    auto train = user_side(m);
    auto test = test_side(m);
    std::multiset<Cell> both = train;
    both.insert(test.begin(), test.end());
    EXPECT_EQ(both, expected);
    EXPECT_EQ(m.num_ratings + m.num_test_ratings, unique.size());
    for (const auto& c : test) EXPECT_EQ(train.count(c), 0u);

    for (const auto* profiles : {&m.users, &m.items}) {
      for (const auto& p : *profiles) {
        for (std::size_t k = 1; k < p.ratings.size(); ++k) {
          EXPECT_LT(p.ratings[k - 1].index, p.ratings[k].index);
        }
        double sum = 0;
        for (const auto& r : p.ratings) sum += r.value;
        const double avg = p.ratings.empty() ? 0.0 : sum / p.ratings.size();
        EXPECT_LE(std::abs(avg - p.rating_average), 1e-12);
        double sq = 0;
        for (const auto& r : p.ratings) sq += (r.value - avg) * (r.value - avg);
        const double sd = p.ratings.empty() ? 0.0 : std::sqrt(sq / p.ratings.size());
        EXPECT_LE(std::abs(sd - p.rating_stddev), 1e-12);
        for (const auto& r : p.ratings) {
          EXPECT_GE(r.value, m.bounds.min);
          EXPECT_LE(r.value, m.bounds.max);
        }
      }
    }

    // Test users keep their non-test ratings as training data.
    for (const auto& tu : m.test_users) {
      for (const auto& tr : tu.test_ratings) {
        EXPECT_FALSE(m.rating(tu.index, m.test_items[tr.index].index));
      }
    }

    EXPECT_TRUE(same_data(m, build_model(triples, {0.4, 0.4, seed})));
  }
}

TEST(ModelInvariants, DifferentSeedsUsuallyDiffer) {
  const auto triples = testing::full_grid(20, 20);
  auto a = build_model(triples, {0.5, 0.5, 1});
  auto b = build_model(triples, {0.5, 0.5, 2});
  EXPECT_FALSE(same_data(a, b));
}

}  // namespace
}  // namespace cfkit

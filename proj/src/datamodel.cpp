#include "cfkit/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cfkit/error.hpp"
#include "cfkit/random.hpp"

namespace cfkit {
namespace {

std::optional<double> find_rating(std::span<const Rating> ratings,
                                  std::size_t index) {
  auto it = std::lower_bound(
      ratings.begin(), ratings.end(), index,
      [](const Rating& r, std::size_t idx) { return r.index < idx; });
  if (it == ratings.end() || it->index != index) return std::nullopt;
  return it->value;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line,
                                    std::string_view sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + sep.size();
  }
}

double parse_rating(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line_no,
                     "rating is not a number: \"" + std::string(field) + "\"");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line_no, "rating is not finite");
  }
  return value;
}

void finalize_profile(EntityProfile& p) {
  std::sort(p.ratings.begin(), p.ratings.end(),
            [](const Rating& a, const Rating& b) { return a.index < b.index; });
  p.rating_average = mean_of(p.ratings);
  p.rating_stddev = stddev_of(p.ratings, p.rating_average);
}

void sort_test_ratings(TestProfile& p) {
  std::sort(p.test_ratings.begin(), p.test_ratings.end(),
            [](const Rating& a, const Rating& b) { return a.index < b.index; });
}

std::size_t test_count(double fraction, std::size_t n) {
  // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  const auto c = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
  return std::min(c, n);
}

bool same_profile(const EntityProfile& a, const EntityProfile& b) {
  return a.code == b.code && a.index == b.index && a.ratings == b.ratings &&
         a.rating_average == b.rating_average &&
         a.rating_stddev == b.rating_stddev;
}

bool same_test_profile(const TestProfile& a, const TestProfile& b) {
  return a.test_index == b.test_index && a.index == b.index &&
         a.test_ratings == b.test_ratings;
}

template <typename T, typename Eq>
bool all_equal(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), eq);
}

}  // namespace

std::optional<double> EntityProfile::rating_for(std::size_t other_index) const {
  return find_rating(ratings, other_index);
}

std::optional<double> RatingsModel::rating(std::size_t user_index,
                                           std::size_t item_index) const {
  if (user_index >= users.size() || item_index >= items.size()) {
    throw BoundsError("rating(" + std::to_string(user_index) + ", " +
                      std::to_string(item_index) + ") out of range");
  }
  return users[user_index].rating_for(item_index);
}

std::optional<double> RatingsModel::rating_from_item(
    std::size_t item_index, std::size_t user_index) const {
  if (user_index >= users.size() || item_index >= items.size()) {
    throw BoundsError("rating_from_item(" + std::to_string(item_index) + ", " +
                      std::to_string(user_index) + ") out of range");
  }
  return items[item_index].rating_for(user_index);
}

void RatingsModel::clear_stores() {
  for (auto& p : users) p.store.clear();
  for (auto& p : items) p.store.clear();
  for (auto& p : test_users) p.store.clear();
  for (auto& p : test_items) p.store.clear();
}

bool same_data(const RatingsModel& a, const RatingsModel& b) {
  return all_equal(a.users, b.users, same_profile) &&
         all_equal(a.items, b.items, same_profile) &&
         all_equal(a.test_users, b.test_users, same_test_profile) &&
         all_equal(a.test_items, b.test_items, same_test_profile) &&
         a.bounds == b.bounds && a.num_ratings == b.num_ratings &&
         a.num_test_ratings == b.num_test_ratings &&
         a.user_code_to_index == b.user_code_to_index &&
         a.item_code_to_index == b.item_code_to_index &&
         a.split_seed == b.split_seed;
}

double mean_of(std::span<const Rating> ratings) {
  if (ratings.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : ratings) sum += r.value;
  return sum / static_cast<double>(ratings.size());
}

double stddev_of(std::span<const Rating> ratings, double mean) {
  if (ratings.empty()) return 0.0;
  double sq = 0.0;
  for (const auto& r : ratings) sq += (r.value - mean) * (r.value - mean);
  return std::sqrt(sq / static_cast<double>(ratings.size()));
}

LoadResult parse_dataset(std::string_view text, const std::string& separator) {
  if (separator.empty()) throw ArgumentError("separator must not be empty");

  LoadResult result;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;

    if (line.empty() || line.front() == '#') continue;

    const auto fields = split(line, separator);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(line_no, "expected 3 fields separated by \"" +
                                    separator + "\", got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "empty user or item code");
    }
    if (fields.size() == 4) ++result.extra_fields;

    RatingTriple t{std::string(fields[0]), std::string(fields[1]),
                   parse_rating(fields[2], line_no)};
    std::string key = t.user_code;
    key.push_back('\0');
    key += t.item_code;
    auto [it, inserted] = seen.try_emplace(std::move(key),
                                           result.triples.size());
    if (inserted) {
      result.triples.push_back(std::move(t));
    } else {
      ++result.duplicates;
      result.triples[it->second].value = t.value;
    }
  }
  return result;
}

LoadResult load_dataset(const std::string& path, const std::string& separator) {
  if (separator.empty()) throw ArgumentError("separator must not be empty");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open file for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  return parse_dataset(buffer.str(), separator);
}

RatingsModel build_model(std::span<const RatingTriple> triples,
                         const SplitOptions& options) {
  const auto valid_fraction = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!valid_fraction(options.test_user_fraction) ||
      !valid_fraction(options.test_item_fraction)) {
    throw ArgumentError("test fractions must lie in [0, 1]");
  }
  if (triples.empty()) throw EmptyDatasetError();

  RatingsModel model;
  model.split_seed = options.seed;

  // Last occurrence wins for repeated (user, item) pairs.
  std::map<std::pair<std::string_view, std::string_view>, double> unique;
  for (const auto& t : triples) {
    if (!std::isfinite(t.value)) {
      throw DataError("rating for (" + t.user_code + ", " + t.item_code +
                      ") is not finite");
    }
    unique[{t.user_code, t.item_code}] = t.value;
  }

  std::vector<std::string_view> user_codes;
  std::vector<std::string_view> item_codes;
  for (const auto& [key, v] : unique) {
    user_codes.push_back(key.first);
    item_codes.push_back(key.second);
  }
  // user_codes is already sorted because the map is ordered by user first.
  user_codes.erase(std::unique(user_codes.begin(), user_codes.end()),
                   user_codes.end());
  std::sort(item_codes.begin(), item_codes.end());
  item_codes.erase(std::unique(item_codes.begin(), item_codes.end()),
                   item_codes.end());

  model.users.resize(user_codes.size());
  for (std::size_t u = 0; u < user_codes.size(); ++u) {
    model.users[u].code = std::string(user_codes[u]);
    model.users[u].index = u;
    model.user_code_to_index.emplace(model.users[u].code, u);
  }
  model.items.resize(item_codes.size());
  for (std::size_t i = 0; i < item_codes.size(); ++i) {
    model.items[i].code = std::string(item_codes[i]);
    model.items[i].index = i;
    model.item_code_to_index.emplace(model.items[i].code, i);
  }

  Rng rng(options.seed);
  auto mark_tests = [&rng](std::size_t n, double fraction) {
    auto chosen = rng.sample(n, test_count(fraction, n));
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  };
  const auto test_user_ids = mark_tests(model.users.size(),
                                        options.test_user_fraction);
  const auto test_item_ids = mark_tests(model.items.size(),
                                        options.test_item_fraction);

  constexpr auto kNotTest = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> user_test_index(model.users.size(), kNotTest);
  std::vector<std::size_t> item_test_index(model.items.size(), kNotTest);
  model.test_users.resize(test_user_ids.size());
  for (std::size_t t = 0; t < test_user_ids.size(); ++t) {
    model.test_users[t].test_index = t;
    model.test_users[t].index = test_user_ids[t];
    user_test_index[test_user_ids[t]] = t;
  }
  model.test_items.resize(test_item_ids.size());
  for (std::size_t t = 0; t < test_item_ids.size(); ++t) {
    model.test_items[t].test_index = t;
    model.test_items[t].index = test_item_ids[t];
    item_test_index[test_item_ids[t]] = t;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [key, v] : unique) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  model.bounds.min = options.min_rating.value_or(lo);
  model.bounds.max = options.max_rating.value_or(hi);
  if (model.bounds.min > model.bounds.max) {
    throw ArgumentError("minimum rating exceeds maximum rating");
  }
  if (lo < model.bounds.min || hi > model.bounds.max) {
    throw DataError("observed ratings fall outside the configured bounds");
  }

  for (const auto& [key, v] : unique) {
    const auto u = model.user_code_to_index.at(std::string(key.first));
    const auto i = model.item_code_to_index.at(std::string(key.second));
    const auto tu = user_test_index[u];
    const auto ti = item_test_index[i];
    if (tu != kNotTest && ti != kNotTest) {
      model.test_users[tu].test_ratings.push_back(
          {static_cast<std::uint32_t>(ti), v});
      model.test_items[ti].test_ratings.push_back(
          {static_cast<std::uint32_t>(tu), v});
      ++model.num_test_ratings;
    } else {
      model.users[u].ratings.push_back({static_cast<std::uint32_t>(i), v});
      model.items[i].ratings.push_back({static_cast<std::uint32_t>(u), v});
      ++model.num_ratings;
    }
  }

  for (auto& p : model.users) finalize_profile(p);
  for (auto& p : model.items) finalize_profile(p);
  for (auto& p : model.test_users) sort_test_ratings(p);
  for (auto& p : model.test_items) sort_test_ratings(p);
  return model;
}

}  // namespace cfkit

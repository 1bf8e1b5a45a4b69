#include "cfkit/quality.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "cfkit/engine.hpp"
#include "cfkit/error.hpp"
#include "cfkit/pipeline.hpp"

namespace cfkit::quality {
namespace {

// Per-user partial results are kept in the test user's store under these
// keys so that the fold in teardown sees every user's value.
constexpr const char* kMaeKey = "MAE";
constexpr const char* kCoverageKey = "COVERAGE";
constexpr const char* kPrecisionRecallKey = "PRECISION_RECALL";

struct UserPartial {
  double value = 0.0;
  bool defined = false;
};

struct UserPrecisionRecall {
  UserPartial precision;
  UserPartial recall;
};

void require_predictions(const RatingsModel& model) {
  if (model.test_users.empty()) throw EmptyTestSetError();
  for (const auto& tu : model.test_users) {
    if (!tu.store.contains(kPredictionsKey)) {
      throw PipelineOrderError(kPredictionsKey, "prediction");
    }
  }
}

const PredictionVector& predictions_of(const TestProfile& tu) {
  return *tu.store.get<PredictionVector>(kPredictionsKey);
}

MeasureScore fold(std::string name, const std::vector<UserPartial>& partials) {
  MeasureScore score;
  score.name = std::move(name);
  double sum = 0.0;
  for (const auto& p : partials) {
    if (!p.defined) {
      ++score.users_excluded;
      continue;
    }
    sum += p.value;
    ++score.users_counted;
  }
  if (score.users_counted > 0) {
    score.value = sum / static_cast<double>(score.users_counted);
  }
  return score;
}

// Runs a per-user pass storing a T under `key`, then collects the partials
// in ascending user order.
template <typename T, typename F>
std::vector<T> per_user(RatingsModel& model, const char* key,
                        std::size_t workers, F compute) {
  std::vector<T> partials;
  ElementPass pass;
  pass.setup = [](RatingsModel& m) { require_predictions(m); };
  pass.per_element = [key, &compute](RatingsModel& m, std::size_t t) {
    TestProfile& tu = m.test_users[t];
    tu.store.put(key, compute(m, tu));
  };
  pass.teardown = [key, &partials](RatingsModel& m) {
    partials.reserve(m.test_users.size());
    for (const auto& tu : m.test_users) {
      partials.push_back(*tu.store.get<T>(key));
    }
  };
  run_pass(model, PassTarget::kTestUsers, pass, workers);
  return partials;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

MeasureScore measure_mae(RatingsModel& model, std::size_t workers,
                         bool normalize) {
  auto partials = per_user<UserPartial>(
      model, kMaeKey, workers, [](const RatingsModel&, const TestProfile& tu) {
        const auto& pv = predictions_of(tu);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t p = 0; p < tu.test_ratings.size(); ++p) {
          if (std::isnan(pv.values[p])) continue;
          sum += std::abs(pv.values[p] - tu.test_ratings[p].value);
          ++n;
        }
        if (n == 0) return UserPartial{};
        return UserPartial{sum / static_cast<double>(n), true};
      });
  MeasureScore score = fold("MAE", partials);
  if (normalize && score.value && model.bounds.span() > 0.0) {
    *score.value /= model.bounds.span();
  }
  return score;
}

MeasureScore measure_coverage(RatingsModel& model, std::size_t workers) {
  auto partials = per_user<UserPartial>(
      model, kCoverageKey, workers,
      [](const RatingsModel&, const TestProfile& tu) {
        if (tu.test_ratings.empty()) return UserPartial{};
        const auto& pv = predictions_of(tu);
        return UserPartial{static_cast<double>(pv.defined_count()) /
                               static_cast<double>(tu.test_ratings.size()),
                           true};
      });
  return fold("COVERAGE", partials);
}

PrecisionRecall measure_precision_recall(RatingsModel& model,
                                         std::size_t list_size,
                                         double threshold,
                                         std::size_t workers) {
  if (list_size < 1) throw ArgumentError("recommendation list size must be >= 1");
  if (!(threshold >= model.bounds.min && threshold <= model.bounds.max)) {
    throw ArgumentError("relevance threshold must lie within the rating bounds");
  }
  auto partials = per_user<UserPrecisionRecall>(
      model, kPrecisionRecallKey, workers,
      [list_size, threshold](const RatingsModel&, const TestProfile& tu) {
        const auto& pv = predictions_of(tu);
        std::vector<std::size_t> ranked;
        for (std::size_t p = 0; p < pv.values.size(); ++p) {
          if (!std::isnan(pv.values[p])) ranked.push_back(p);
        }
        // test_ratings are sorted by test item index, so a position tie
        // break is an item index tie break.
        const std::size_t keep = std::min(list_size, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                          [&pv](std::size_t a, std::size_t b) {
                            if (pv.values[a] != pv.values[b]) {
                              return pv.values[a] > pv.values[b];
                            }
                            return a < b;
                          });
        ranked.resize(keep);

        std::size_t relevant = 0;
        for (const auto& tr : tu.test_ratings) {
          relevant += tr.value >= threshold ? 1 : 0;
        }
        std::size_t hits = 0;
        for (auto p : ranked) {
          hits += tu.test_ratings[p].value >= threshold ? 1 : 0;
        }

        UserPrecisionRecall r;
        if (!ranked.empty()) {
          r.precision = {static_cast<double>(hits) /
                             static_cast<double>(ranked.size()),
                         true};
        }
        if (relevant > 0) {
          r.recall = {static_cast<double>(hits) / static_cast<double>(relevant),
                      true};
        }
        return r;
      });

  std::vector<UserPartial> precision;
  std::vector<UserPartial> recall;
  for (const auto& p : partials) {
    precision.push_back(p.precision);
    recall.push_back(p.recall);
  }
  PrecisionRecall result;
  result.precision = fold("PRECISION", precision);
  result.recall = fold("RECALL", recall);
  result.f1.name = "F1";
  result.f1.users_counted = result.precision.users_counted;
  result.f1.users_excluded = result.precision.users_excluded;
  if (result.precision.value && result.recall.value) {
    const double p = *result.precision.value;
    const double r = *result.recall.value;
    result.f1.value = (p + r == 0.0) ? 0.0 : 2.0 * p * r / (p + r);
  }
  return result;
}

ResultsGrid::ResultsGrid(std::string measure_name, std::string row_name,
                         std::vector<std::string> row_keys,
                         std::vector<std::string> column_keys)
    : measure_name_(std::move(measure_name)),
      row_name_(std::move(row_name)),
      row_keys_(std::move(row_keys)),
      column_keys_(std::move(column_keys)),
      cells_(row_keys_.size() * column_keys_.size()) {}

std::size_t ResultsGrid::cell_index(const std::string& row,
                                    const std::string& column) const {
  const auto r = std::find(row_keys_.begin(), row_keys_.end(), row);
  const auto c = std::find(column_keys_.begin(), column_keys_.end(), column);
  if (r == row_keys_.end() || c == column_keys_.end()) {
    throw BoundsError("unknown grid cell (" + row + ", " + column + ")");
  }
  return static_cast<std::size_t>(r - row_keys_.begin()) *
             column_keys_.size() +
         static_cast<std::size_t>(c - column_keys_.begin());
}

void ResultsGrid::put(const std::string& row, const std::string& column,
                      std::optional<double> value) {
  cells_[cell_index(row, column)] = value;
}

std::optional<double> ResultsGrid::at(const std::string& row,
                                      const std::string& column) const {
  return cells_[cell_index(row, column)];
}

void ResultsGrid::print(std::ostream& out) const {
  auto text = [](std::optional<double> v) -> std::string {
    if (!v) return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
  };

  std::size_t first = row_name_.size();
  for (const auto& r : row_keys_) first = std::max(first, r.size());
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < column_keys_.size(); ++c) {
    std::size_t w = column_keys_[c].size();
    for (std::size_t r = 0; r < row_keys_.size(); ++r) {
      w = std::max(w, text(cells_[r * column_keys_.size() + c]).size());
    }
    widths.push_back(w);
  }

  auto pad_left = [](const std::string& s, std::size_t w) {
    return std::string(w - std::min(w, s.size()), ' ') + s;
  };
  auto pad_right = [](const std::string& s, std::size_t w) {
    return s + std::string(w - std::min(w, s.size()), ' ');
  };

  out << measure_name_ << '\n';
  out << pad_right(row_name_, first);
  for (std::size_t c = 0; c < column_keys_.size(); ++c) {
    out << "  " << pad_left(column_keys_[c], widths[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < row_keys_.size(); ++r) {
    out << pad_right(row_keys_[r], first);
    for (std::size_t c = 0; c < column_keys_.size(); ++c) {
      out << "  "
          << pad_left(text(cells_[r * column_keys_.size() + c]), widths[c]);
    }
    out << '\n';
  }
}

std::string ResultsGrid::to_csv() const {
  std::string out = csv_field(row_name_);
  for (const auto& c : column_keys_) out += "," + csv_field(c);
  out += "\r\n";
  for (std::size_t r = 0; r < row_keys_.size(); ++r) {
    out += csv_field(row_keys_[r]);
    for (std::size_t c = 0; c < column_keys_.size(); ++c) {
      out += ',';
      const auto& v = cells_[r * column_keys_.size() + c];
      if (v) out += format_shortest(*v);
    }
    out += "\r\n";
  }
  return out;
}

void ResultsGrid::export_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open file for writing");
  out << to_csv();
  if (!out) throw IoError(path, "write failed");
}

std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace cfkit::quality

#include "cfkit/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>

#include "cfkit/engine.hpp"
#include "cfkit/error.hpp"

namespace cfkit {
namespace {

bool needs_ranking(const std::vector<Measure>& measures) {
  return std::any_of(measures.begin(), measures.end(), [](Measure m) {
    return m == Measure::kPrecision || m == Measure::kRecall ||
           m == Measure::kF1;
  });
}

// Scores every selected measure on the predictions currently stored.
std::vector<quality::MeasureScore> score(const ExperimentConfig& config,
                                         RatingsModel& model,
                                         std::size_t workers) {
  std::optional<quality::PrecisionRecall> ranking;
  if (needs_ranking(config.measures)) {
    ranking = quality::measure_precision_recall(model, *config.list_size,
                                                *config.threshold, workers);
  }
  std::vector<quality::MeasureScore> scores;
  for (const auto m : config.measures) {
    switch (m) {
      case Measure::kMae:
        scores.push_back(
            quality::measure_mae(model, workers, config.normalize_mae));
        break;
      case Measure::kCoverage:
        scores.push_back(quality::measure_coverage(model, workers));
        break;
      case Measure::kPrecision:
        scores.push_back(ranking->precision);
        break;
      case Measure::kRecall:
        scores.push_back(ranking->recall);
        break;
      case Measure::kF1:
        scores.push_back(ranking->f1);
        break;
    }
  }
  return scores;
}

}  // namespace

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::kMae:
      return "MAE";
    case Measure::kCoverage:
      return "COVERAGE";
    case Measure::kPrecision:
      return "PRECISION";
    case Measure::kRecall:
      return "RECALL";
    case Measure::kF1:
      return "F1";
  }
  return "?";
}

std::optional<Measure> parse_measure(std::string_view name) {
  for (auto m : {Measure::kMae, Measure::kCoverage, Measure::kPrecision,
                 Measure::kRecall, Measure::kF1}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

std::size_t ExperimentConfig::effective_workers() const {
  return workers == 0 ? default_workers() : workers;
}

void validate_common(const ExperimentConfig& config) {
  const auto fraction_ok = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!fraction_ok(config.test_user_fraction) ||
      !fraction_ok(config.test_item_fraction)) {
    throw ArgumentError("test fractions must lie in [0, 1]");
  }
  if (config.separator.empty()) {
    throw ArgumentError("separator must not be empty");
  }
  if (config.measures.empty()) {
    throw ArgumentError("select at least one measure");
  }
  if (needs_ranking(config.measures)) {
    if (!config.list_size || !config.threshold) {
      throw ArgumentError(
          "PRECISION, RECALL and F1 require --n and --theta");
    }
    if (*config.list_size < 1) throw ArgumentError("--n must be >= 1");
  }
}

void validate_knn(const ExperimentConfig& config) {
  validate_common(config);
  if (config.metrics.empty()) {
    throw ArgumentError("select at least one similarity metric");
  }
  if (config.neighbor_counts.empty()) {
    throw ArgumentError("the list of neighbor counts is empty");
  }
  for (std::size_t i = 0; i < config.neighbor_counts.size(); ++i) {
    if (config.neighbor_counts[i] == 0) {
      throw ArgumentError("neighbor counts must be positive");
    }
    if (i > 0 && config.neighbor_counts[i] <= config.neighbor_counts[i - 1]) {
      throw ArgumentError("neighbor counts must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < config.metrics.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.metrics[i] == config.metrics[j]) {
        throw ArgumentError("metric " +
                            std::string(knn::to_string(config.metrics[i])) +
                            " listed twice");
      }
    }
  }
}

void validate_mf(const ExperimentConfig& config) {
  validate_common(config);
  const auto& p = config.pmf;
  if (p.num_factors < 1) throw ArgumentError("--factors must be >= 1");
  if (!(p.learning_rate > 0.0)) {
    throw ArgumentError("--learning-rate must be > 0");
  }
  if (!(p.regularization >= 0.0)) {
    throw ArgumentError("--regularization must be >= 0");
  }
  if (p.epochs < 1) throw ArgumentError("--epochs must be >= 1");
}

LoadedModel load_model(const ExperimentConfig& config) {
  auto loaded = load_dataset(config.dataset_path, config.separator);
  SplitOptions split;
  split.test_user_fraction = config.test_user_fraction;
  split.test_item_fraction = config.test_item_fraction;
  split.seed = config.split_seed;
  split.min_rating = config.min_rating;
  split.max_rating = config.max_rating;
  LoadedModel result{build_model(loaded.triples, split), loaded.duplicates,
                     loaded.extra_fields};
  return result;
}

std::vector<quality::ResultsGrid> run_knn_experiment(
    const ExperimentConfig& config, RatingsModel& model) {
  validate_knn(config);
  const std::size_t workers = config.effective_workers();

  std::vector<std::string> rows;
  for (auto k : config.neighbor_counts) rows.push_back(std::to_string(k));
  std::vector<std::string> columns;
  for (auto m : config.metrics) columns.emplace_back(knn::to_string(m));

  std::vector<quality::ResultsGrid> grids;
  for (auto m : config.measures) {
    grids.emplace_back(std::string(to_string(m)), "k", rows, columns);
  }

  for (const auto metric : config.metrics) {
    knn::similarity_pass(model, config.orientation, metric, workers);
    for (const auto k : config.neighbor_counts) {
      knn::neighbors_pass(model, config.orientation, k, workers);
      knn::aggregation_pass(model, config.orientation, config.aggregation,
                            workers);
      const auto scores = score(config, model, workers);
      for (std::size_t g = 0; g < grids.size(); ++g) {
        grids[g].put(std::to_string(k), std::string(knn::to_string(metric)),
                     scores[g].value);
      }
    }
  }
  return grids;
}

std::vector<quality::ResultsGrid> run_knn_experiment(
    const ExperimentConfig& config) {
  validate_knn(config);
  auto loaded = load_model(config);
  return run_knn_experiment(config, loaded.model);
}

std::vector<quality::ResultsGrid> run_mf_experiment(
    const ExperimentConfig& config, RatingsModel& model) {
  validate_mf(config);
  const std::size_t workers = config.effective_workers();
  const auto factors = mf::train_pmf(model, config.pmf);
  mf::predictions_pass(model, factors, workers);
  const auto scores = score(config, model, workers);

  const std::string row = std::to_string(config.pmf.epochs);
  std::vector<quality::ResultsGrid> grids;
  for (std::size_t g = 0; g < config.measures.size(); ++g) {
    grids.emplace_back(std::string(to_string(config.measures[g])), "epochs",
                       std::vector<std::string>{row},
                       std::vector<std::string>{"PMF"});
    grids.back().put(row, "PMF", scores[g].value);
  }
  return grids;
}

std::vector<quality::ResultsGrid> run_mf_experiment(
    const ExperimentConfig& config) {
  validate_mf(config);
  auto loaded = load_model(config);
  return run_mf_experiment(config, loaded.model);
}

void print_stats(std::ostream& out, const LoadedModel& loaded) {
  const auto& m = loaded.model;
  const double cells =
      static_cast<double>(m.users.size()) * static_cast<double>(m.items.size());
  const double density =
      cells > 0 ? static_cast<double>(m.num_ratings + m.num_test_ratings) / cells
                : 0.0;
  out << "users: " << m.users.size() << '\n'
      << "items: " << m.items.size() << '\n'
      << "test users: " << m.test_users.size() << '\n'
      << "test items: " << m.test_items.size() << '\n'
      << "ratings: " << m.num_ratings << '\n'
      << "test ratings: " << m.num_test_ratings << '\n'
      << "min rating: " << quality::format_shortest(m.bounds.min) << '\n'
      << "max rating: " << quality::format_shortest(m.bounds.max) << '\n'
      << "density: " << std::fixed << std::setprecision(6) << density
      << std::defaultfloat << '\n'
      << "duplicate lines: " << loaded.duplicates << '\n'
      << "split seed: " << m.split_seed << '\n';
}

std::string csv_path_for(const std::string& base, const std::string& measure,
                         std::size_t grid_count) {
  if (grid_count <= 1) return base;
  std::filesystem::path p(base);
  const auto ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + measure + ext;
}

void emit_grids(std::ostream& out,
                const std::vector<quality::ResultsGrid>& grids,
                const ExperimentConfig& config) {
  for (std::size_t g = 0; g < grids.size(); ++g) {
    if (g > 0) out << '\n';
    grids[g].print(out);
    if (!config.csv_path.empty()) {
      grids[g].export_csv(csv_path_for(config.csv_path,
                                       grids[g].measure_name(), grids.size()));
    }
  }
}

}  // namespace cfkit

#include "cfkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

#include "cfkit/engine.hpp"
#include "cfkit/error.hpp"
#include "cfkit/experiment.hpp"

namespace cfkit {
namespace {

struct RawOptions {
  std::string orientation = "user";
  std::vector<std::string> metrics;
  std::vector<std::size_t> ks;
  std::string aggregation = "dfm";
  std::vector<std::string> measures;
  std::optional<std::size_t> list_size;
  std::optional<double> threshold;
  std::optional<double> min_rating;
  std::optional<double> max_rating;
  std::string config_path;
};

std::string join_names(std::initializer_list<std::string_view> names) {
  std::string out;
  for (auto n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void add_shared(CLI::App& cmd, ExperimentConfig& config, RawOptions& raw) {
  // Expanded before parsing; listed here for --help.
  cmd.add_option("--config", raw.config_path,
                 "key=value file; flags given on the command line win");
  cmd.add_option("--dataset", config.dataset_path, "Ratings file")->required();
  cmd.add_option("--separator", config.separator, "Field separator")
      ->capture_default_str();
  cmd.add_option("--test-users", config.test_user_fraction,
                 "Fraction of users drawn as test users")
      ->capture_default_str();
  cmd.add_option("--test-items", config.test_item_fraction,
                 "Fraction of items drawn as test items")
      ->capture_default_str();
  cmd.add_option("--seed", config.split_seed, "Split seed")
      ->capture_default_str();
  cmd.add_option("--workers", config.workers, "Worker threads (0 = auto)")
      ->capture_default_str();
  cmd.add_option("--min-rating", raw.min_rating,
                 "Lowest possible rating (default: observed)");
  cmd.add_option("--max-rating", raw.max_rating,
                 "Highest possible rating (default: observed)");
}

void add_measures(CLI::App& cmd, ExperimentConfig& config, RawOptions& raw) {
  cmd.add_option("--measure", raw.measures,
                 "MAE|COVERAGE|PRECISION|RECALL|F1 (repeatable, default MAE)")
      ->delimiter(',');
  cmd.add_option("--n", raw.list_size, "Recommendation list size");
  cmd.add_option("--theta", raw.threshold, "Relevance threshold");
  cmd.add_flag("--normalize-mae", config.normalize_mae,
               "Divide MAE by the rating range");
  cmd.add_option("--csv", config.csv_path, "Export grids as CSV");
}

void resolve_common(ExperimentConfig& config, const RawOptions& raw) {
  config.min_rating = raw.min_rating;
  config.max_rating = raw.max_rating;
  config.list_size = raw.list_size;
  config.threshold = raw.threshold;
  config.measures.clear();
  if (raw.measures.empty()) config.measures.push_back(Measure::kMae);
  for (const auto& name : raw.measures) {
    auto m = parse_measure(name);
    if (!m) {
      throw ArgumentError("unknown measure \"" + name + "\"; valid: " +
                          join_names({"MAE", "COVERAGE", "PRECISION", "RECALL",
                                      "F1"}));
    }
    config.measures.push_back(*m);
  }
}

void resolve_knn(ExperimentConfig& config, const RawOptions& raw) {
  resolve_common(config, raw);
  auto o = knn::parse_orientation(raw.orientation);
  if (!o) {
    throw ArgumentError("unknown orientation \"" + raw.orientation +
                        "\"; valid: user, item");
  }
  config.orientation = *o;
  auto a = knn::parse_aggregation(raw.aggregation);
  if (!a) {
    throw ArgumentError("unknown aggregation \"" + raw.aggregation +
                        "\"; valid: mean, wmean, dfm");
  }
  config.aggregation = *a;
  config.metrics.clear();
  for (const auto& name : raw.metrics) {
    auto m = knn::parse_metric(name);
    if (!m) {
      throw ArgumentError("unknown metric \"" + name +
                          "\"; valid: " + join_names({"COR", "COSINE", "MSD",
                                                      "JMSD"}));
    }
    config.metrics.push_back(*m);
  }
  config.neighbor_counts = raw.ks;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Replaces `--config FILE` with the options the file lists, one key=value per
// line. Keys are option names without dashes.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw ArgumentError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;

  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read config file " + path);
  const auto explicit_args = out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError(path + ":" + std::to_string(number) +
                          ": expected key=value");
    }
    auto key = std::string(trim(text.substr(0, eq)));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    const auto flag = "--" + key;
    if (key.empty() || key == "config") {
      throw ArgumentError(path + ":" + std::to_string(number) + ": bad key");
    }
    if (given(explicit_args, flag)) continue;
    out.push_back(flag + "=" + std::string(trim(text.substr(eq + 1))));
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Collaborative filtering experiments: KNN and matrix factorization",
               "cfkit"};
  app.require_subcommand(1);

  ExperimentConfig config;
  RawOptions raw;

  auto* stats = app.add_subcommand("stats", "Summarize a dataset and its split");
  add_shared(*stats, config, raw);

  auto* knn_cmd = app.add_subcommand("knn", "Run a KNN grid over metrics and k");
  add_shared(*knn_cmd, config, raw);
  add_measures(*knn_cmd, config, raw);
  knn_cmd->add_option("--orientation", raw.orientation, "user|item")
      ->capture_default_str();
  knn_cmd->add_option("--metric", raw.metrics, "COR|COSINE|MSD|JMSD (repeatable)")
      ->delimiter(',')
      ->required();
  knn_cmd->add_option("--k", raw.ks, "Comma-separated neighbor counts")
      ->delimiter(',')
      ->required();
  knn_cmd->add_option("--aggregation", raw.aggregation, "mean|wmean|dfm")
      ->capture_default_str();

  auto* mf_cmd = app.add_subcommand("mf", "Train PMF and measure its predictions");
  add_shared(*mf_cmd, config, raw);
  add_measures(*mf_cmd, config, raw);
  mf_cmd->add_option("--factors", config.pmf.num_factors)->capture_default_str();
  mf_cmd->add_option("--learning-rate", config.pmf.learning_rate)
      ->capture_default_str();
  mf_cmd->add_option("--regularization", config.pmf.regularization)
      ->capture_default_str();
  mf_cmd->add_option("--epochs", config.pmf.epochs)->capture_default_str();
  mf_cmd->add_option("--init-seed", config.pmf.init_seed)->capture_default_str();

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (stats->parsed()) {
      resolve_common(config, raw);
      const auto loaded = load_model(config);
      print_stats(out, loaded);
    } else if (knn_cmd->parsed()) {
      resolve_knn(config, raw);
      validate_knn(config);
      auto loaded = load_model(config);
      const auto grids = run_knn_experiment(config, loaded.model);
      emit_grids(out, grids, config);
    } else if (mf_cmd->parsed()) {
      resolve_common(config, raw);
      validate_mf(config);
      auto loaded = load_model(config);
      const auto grids = run_mf_experiment(config, loaded.model);
      emit_grids(out, grids, config);
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace cfkit

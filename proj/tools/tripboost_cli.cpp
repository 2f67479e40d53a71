#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tripboost/csv.hpp"
#include "tripboost/errors.hpp"
#include "tripboost/experiment.hpp"
#include "tripboost/featurize.hpp"
#include "tripboost/folds.hpp"
#include "tripboost/kv_config.hpp"
#include "tripboost/metrics.hpp"
#include "tripboost/model.hpp"
#include "tripboost/persist.hpp"
#include "tripboost/report.hpp"
#include "tripboost/synthgen.hpp"
#include "tripboost/trip_data.hpp"

namespace fs = std::filesystem;
using namespace tripboost;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Args {
  std::string config;
  std::string stops;
  std::vector<std::string> columns;  // field=header
  std::string out;

  // synth
  std::uint64_t synth_seed = 0;

  // run / scale / models
  int scenario = 1;
  std::string target = "duration";
  std::string models = "hgb";
  std::string model = "hgb";
  std::size_t workers = 0;
  std::size_t timing_repeats = 1;
  std::string sizes;
  std::size_t repeats = 3;
  std::size_t train_rows = 0;
  std::string ada_loss = "linear";
  ModelOptions opts;

  // load-model / summarize
  std::string model_path;
  std::string predictions;
  std::string features;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text + ",") {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item += c;
    }
  }
  return out;
}

void add_column_option(CLI::App* sub, Args& a) {
  sub->add_option("--column", a.columns,
                  "Remap a stops CSV column: FIELD=HEADER (e.g. city=Town); repeatable")
      ->expected(1)
      ->allow_extra_args(false)
      ->take_all();
}

void add_model_options(CLI::App* sub, Args& a) {
  sub->add_option("--seed", a.opts.seed, "Seed for stochastic learners");
  sub->add_option("--n-estimators", a.opts.n_estimators, "Ensemble size")->capture_default_str();
  sub->add_option("--learning-rate", a.opts.learning_rate, "Boosting shrinkage")
      ->capture_default_str();
  sub->add_option("--max-depth", a.opts.boosting_max_depth, "Depth of boosting base trees")
      ->capture_default_str();
  sub->add_option("--tree-max-depth", a.opts.tree_max_depth,
                  "Depth limit for dt/br/rf trees (-1 = unlimited)")
      ->capture_default_str();
  sub->add_option("--max-bins", a.opts.max_bins, "Histogram bins for hgb (2..255)")
      ->capture_default_str();
  sub->add_option("--ridge-lambda", a.opts.ridge_lambda, "Ridge penalty")->capture_default_str();
  sub->add_option("--lasso-ratio", a.opts.lasso_lambda_ratio,
                  "Lasso penalty as a fraction of lambda_max")
      ->capture_default_str();
  sub->add_option("--ada-loss", a.ada_loss, "AdaBoost.R2 loss: linear|square|exponential")
      ->capture_default_str();
}

/// Builds the command tree over `a`. Called twice when a config file is
/// given: once to locate it, once with its values injected ahead of argv.
void build_app(CLI::App& app, Args& a) {
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic stops CSV");
  synth->add_option("--config", a.config, "Generator key-value file");
  synth->add_option("--seed", a.synth_seed, "Override the generator seed");
  synth->add_option("--out", a.out, "Output stops CSV")->required();

  auto* summarize = app.add_subcommand("summarize", "Print dataset statistics for a stops CSV");
  summarize->add_option("stops", a.stops, "Stops CSV")->required();
  summarize->add_option("--config", a.config, "Key-value file of flag defaults");
  add_column_option(summarize, a);
  summarize->add_option("--features", a.features, "Also write the feature table to this CSV");
  summarize->add_option("--target", a.target, "Target for --features: duration|delay")
      ->capture_default_str();

  auto* run = app.add_subcommand("run", "Evaluate models under a retraining scenario");
  run->add_option("stops", a.stops, "Stops CSV")->required();
  run->add_option("--config", a.config, "Key-value file of flag defaults");
  add_column_option(run, a);
  run->add_option("--scenario", a.scenario, "Retraining scenario 0..4")->capture_default_str();
  run->add_option("--target", a.target, "duration|delay")->capture_default_str();
  run->add_option("--models", a.models, "Comma-separated model abbreviations")
      ->capture_default_str();
  run->add_option("--workers", a.workers, "Concurrent folds (0 = machine parallelism)")
      ->capture_default_str();
  run->add_option("--timing-repeats", a.timing_repeats, "Fits per fold; median time is reported")
      ->capture_default_str();
  run->add_option("--out", a.out, "Output directory")->required();
  add_model_options(run, a);

  auto* scale = app.add_subcommand("scale", "Measure fit time against training-set size");
  scale->add_option("stops", a.stops, "Stops CSV")->required();
  scale->add_option("--config", a.config, "Key-value file of flag defaults");
  add_column_option(scale, a);
  scale->add_option("--sizes", a.sizes, "Comma-separated training sizes (default 1000..150000)");
  scale->add_option("--models", a.models, "Comma-separated model abbreviations");
  scale->add_option("--target", a.target, "duration|delay")->capture_default_str();
  scale->add_option("--repeats", a.repeats, "Timed fits per point (median reported)")
      ->capture_default_str();
  scale->add_option("--out", a.out, "Output directory")->required();
  add_model_options(scale, a);

  auto* save = app.add_subcommand("save-model", "Fit one model on a stops CSV and persist it");
  save->add_option("stops", a.stops, "Stops CSV")->required();
  save->add_option("--config", a.config, "Key-value file of flag defaults");
  add_column_option(save, a);
  save->add_option("--model", a.model, "Model abbreviation")->capture_default_str();
  save->add_option("--target", a.target, "duration|delay")->capture_default_str();
  save->add_option("--train-rows", a.train_rows, "Use only the first N chronological trips");
  save->add_option("--out", a.out, "Model file")->required();
  add_model_options(save, a);

  auto* load = app.add_subcommand("load-model", "Load a persisted model, optionally predict");
  load->add_option("model", a.model_path, "Model file")->required();
  load->add_option("--config", a.config, "Key-value file of flag defaults");
  add_column_option(load, a);
  load->add_option("--stops", a.stops, "Stops CSV to predict");
  load->add_option("--target", a.target, "Target to score against: duration|delay")
      ->capture_default_str();
  load->add_option("--predictions", a.predictions, "Write trip_id,prediction,target CSV");
}

StopSchema schema_from(const std::vector<std::string>& columns) {
  StopSchema s;
  const std::map<std::string, std::string*> fields = {
      {"trip_number", &s.trip_number},   {"trip_description", &s.trip_description},
      {"stop_number", &s.stop_number},   {"client_name", &s.client_name},
      {"address", &s.address},           {"city", &s.city},
      {"scheduled_time", &s.scheduled_time}, {"actual_time", &s.actual_time},
  };
  for (const auto& spec : columns) {
    const auto eq = spec.find('=');
    const auto it = eq == std::string::npos ? fields.end() : fields.find(spec.substr(0, eq));
    if (it == fields.end() || eq + 1 >= spec.size()) {
      throw ConfigError("bad column remap '" + spec + "' (expected FIELD=HEADER)");
    }
    *it->second = spec.substr(eq + 1);
  }
  return s;
}

std::vector<Trip> load_trips(const Args& a) {
  auto parsed = parse_stops_csv(fs::path(a.stops), schema_from(a.columns));
  for (const auto& d : parsed.rejected) {
    std::cerr << a.stops << ":" << d.line << ": rejected: " << d.reason << "\n";
  }
  auto assembled = assemble_trips(parsed.records);
  for (const auto& d : assembled.excluded) {
    std::cerr << "trip " << d.trip_id << " excluded: " << d.reason << "\n";
  }
  if (assembled.trips.empty()) throw DataError("no valid trips in " + a.stops);
  return std::move(assembled.trips);
}

ModelOptions model_options(const Args& a) {
  ModelOptions o = a.opts;
  o.ada_loss = parse_ada_loss(a.ada_loss);
  return o;
}

std::vector<ModelFactory> factories_for(const std::string& list, const ModelOptions& o) {
  std::vector<ModelFactory> out;
  for (const auto& name : split_list(list)) out.push_back(make_factory(name, o));
  if (out.empty()) throw ConfigError("no models given");
  return out;
}

int cmd_synth(const Args& a, const CLI::App& sub) {
  GenConfig cfg;
  if (!a.config.empty()) cfg = GenConfig::from_kv(KeyValueConfig::load(a.config));
  if (sub.count("--seed")) cfg.seed = a.synth_seed;
  cfg.validate();
  const auto records = generate(cfg);
  write_file_atomic(a.out, [&](std::ostream& out) { write_stops_csv(out, records); });
  std::size_t trips = 0;
  for (const auto& r : records) trips += r.stop_number == 1;
  std::cout << "wrote " << records.size() << " stop rows (" << trips << " trips) to " << a.out
            << "\n";
  return kOk;
}

int cmd_summarize(const Args& a) {
  const auto trips = load_trips(a);
  print_summary(std::cout, summarize(trips));
  if (!a.features.empty()) {
    const auto table = build_table(trips, parse_target_kind(a.target));
    write_file_atomic(a.features, [&](std::ostream& out) { write_feature_csv(out, table); });
    std::cout << "wrote " << table.size() << " feature rows to " << a.features << "\n";
  }
  return kOk;
}

int cmd_run(const Args& a) {
  const auto spec = ScenarioSpec::scenario(a.scenario);
  const auto factories = factories_for(a.models, model_options(a));
  const auto table = build_table(load_trips(a), parse_target_kind(a.target));

  std::vector<RunResult> results;
  std::vector<Aggregate> aggregates;
  RunOptions ro;
  ro.workers = a.workers;
  ro.timing_repeats = a.timing_repeats;
  for (const auto& f : factories) {
    auto run = run_scenario(table, spec, f, ro);
    for (const auto& issue : run.issues) {
      std::cerr << f.name << " fold " << issue.fold << " " << issue.reason << "\n";
    }
    results.insert(results.end(), run.results.begin(), run.results.end());
    aggregates.push_back(run.aggregate);
  }

  fs::create_directories(a.out);
  write_file_atomic(fs::path(a.out) / "results.csv",
                    [&](std::ostream& out) { write_results_csv(out, results); });
  write_file_atomic(fs::path(a.out) / "aggregates.csv",
                    [&](std::ostream& out) { write_aggregates_csv(out, aggregates); });
  std::cout << spec.describe() << ", target " << a.target << ", " << table.size() << " trips\n";
  print_aggregates(std::cout, aggregates);
  return kOk;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  if (text.empty()) return kDefaultScaleSizes;
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    unsigned long long n = 0;
    try {
      n = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') {
      throw ConfigError("--sizes: '" + item + "' is not a row count");
    }
    out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

int cmd_scale(const Args& a) {
  ModelOptions o = model_options(a);
  o.workers = 1;
  const auto factories = factories_for(a.models.empty() ? "hgb,gb" : a.models, o);
  const auto table = build_table(load_trips(a), parse_target_kind(a.target));
  const auto rows = run_scale_bench(table, parse_sizes(a.sizes), factories, a.repeats);

  fs::create_directories(a.out);
  write_file_atomic(fs::path(a.out) / "scale.csv",
                    [&](std::ostream& out) { write_scale_csv(out, rows); });
  write_file_atomic(fs::path(a.out) / "scale.svg",
                    [&](std::ostream& out) { write_scale_svg(out, rows); });
  write_scale_csv(std::cout, rows);
  return kOk;
}

int cmd_save_model(const Args& a) {
  const auto factory = make_factory(a.model, model_options(a));
  const auto table = build_table(load_trips(a), parse_target_kind(a.target));
  const std::size_t n = a.train_rows ? std::min(a.train_rows, table.size()) : table.size();
  const Model model = factory.fit(table.features(0, n), table.targets(0, n));
  save_model(model, a.out);
  std::cout << "saved " << model.name() << " trained on " << n << " trips to " << a.out << "\n";
  return kOk;
}

std::string describe(const Model& m) {
  return std::visit(
      [](const auto& fitted) -> std::string {
        using T = std::decay_t<decltype(fitted)>;
        if constexpr (std::is_same_v<T, Tree>) {
          return "tree, depth " + std::to_string(fitted.depth()) + ", " +
                 std::to_string(fitted.leaf_count()) + " leaves";
        } else if constexpr (std::is_same_v<T, EnsembleModel>) {
          return std::string(to_string(fitted.kind)) + ", " + std::to_string(fitted.members.size()) +
                 " members";
        } else {
          return std::string("linear, penalty ") + to_string(fitted.penalty);
        }
      },
      m.fitted());
}

int cmd_load_model(const Args& a) {
  const Model model = load_model(a.model_path);
  std::cout << model.name() << ": " << describe(model) << "\n";
  if (a.stops.empty()) return kOk;

  const auto table = build_table(load_trips(a), parse_target_kind(a.target));
  const auto predicted = model.predict(table.features());
  const auto y = table.targets();
  std::cout << "trips " << table.size() << ", mae_s " << format_double(mae(y, predicted))
            << ", rmse_s " << format_double(rmse(y, predicted)) << "\n";
  if (!a.predictions.empty()) {
    write_file_atomic(a.predictions, [&](std::ostream& out) {
      out << "trip_id,prediction,target\n";
      for (std::size_t i = 0; i < table.size(); ++i) {
        write_csv_row(out, {table.rows[i].trip_id, format_double(predicted[i]), format_double(y[i])});
      }
    });
  }
  return kOk;
}

/// Turns `key = value` lines into `--key=value` arguments; `column.F = H`
/// becomes `--column=F=H`.
std::vector<std::string> config_arguments(const std::string& path, const CLI::App& sub) {
  const auto kv = KeyValueConfig::load(path);
  std::vector<std::string> out;
  for (const auto& [key, value] : kv.values()) {
    if (key.rfind("column.", 0) == 0) {
      out.push_back("--column=" + key.substr(7) + "=" + value);
      continue;
    }
    if (key == "config" || !sub.get_option_no_throw("--" + key)) {
      throw ConfigError(path + ": '" + key + "' is not an option of '" + sub.get_name() + "'");
    }
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

int dispatch(const Args& a, const CLI::App& app) {
  const CLI::App* sub = app.get_subcommands().front();
  const std::string& name = sub->get_name();
  if (name == "synth") return cmd_synth(a, *sub);
  if (name == "summarize") return cmd_summarize(a);
  if (name == "run") return cmd_run(a);
  if (name == "scale") return cmd_scale(a);
  if (name == "save-model") return cmd_save_model(a);
  return cmd_load_model(a);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto app = std::make_unique<CLI::App>("Trip duration and delay regression toolkit", "tripboost");
  auto a = std::make_unique<Args>();
  try {
    build_app(*app, *a);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app->parse(reversed);
    } catch (const CLI::ParseError& e) {
      return app->exit(e) == 0 ? kOk : kUsage;
    }

    const CLI::App* sub = app->get_subcommands().front();
    if (!a->config.empty() && sub->get_name() != "synth") {
      auto injected = config_arguments(a->config, *sub);
      const auto pos = std::find(args.begin(), args.end(), sub->get_name());
      args.insert(pos + 1, injected.begin(), injected.end());
      app = std::make_unique<CLI::App>("Trip duration and delay regression toolkit", "tripboost");
      a = std::make_unique<Args>();
      build_app(*app, *a);
      reversed.assign(args.rbegin(), args.rend());
      try {
        app->parse(reversed);
      } catch (const CLI::ParseError& e) {
        return app->exit(e) == 0 ? kOk : kUsage;
      }
    }
    return dispatch(*a, *app);
  } catch (const ConfigError& e) {
    std::cerr << "tripboost: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "tripboost: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "tripboost: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

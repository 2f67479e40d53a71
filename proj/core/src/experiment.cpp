#include "tripboost/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

#include "tripboost/errors.hpp"
#include "tripboost/metrics.hpp"
#include "tripboost/parallel.hpp"

namespace tripboost {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

template <typename Fn>
double timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

Aggregate aggregate_results(const std::vector<RunResult>& results) {
  Aggregate a;
  if (results.empty()) return a;
  a.scenario = results.front().scenario;
  a.model = results.front().model;
  a.target = results.front().target;
  a.folds = results.size();
  for (const auto& r : results) {
    a.mean_mae += r.mae;
    a.mean_rmse += r.rmse;
    a.mean_fit_time += r.fit_time;
  }
  const auto n = static_cast<double>(results.size());
  a.mean_mae /= n;
  a.mean_rmse /= n;
  a.mean_fit_time /= n;
  return a;
}

ScenarioRun run_scenario(const FeatureTable& table, const ScenarioSpec& spec,
                         const ModelFactory& factory, const RunOptions& options) {
  const auto folds = make_folds(table, spec);
  std::vector<std::optional<RunResult>> slots(folds.size());
  std::vector<std::optional<FoldIssue>> issue_slots(folds.size());

  parallel_for(folds.size(), options.workers, [&](std::size_t k) {
    const Fold& fold = folds[k];
    if (fold.n_test() == 0) {
      issue_slots[k] = FoldIssue{fold.index, "skipped: no test rows in " +
                                                 format_timestamp(fold.test_start) + " .. " +
                                                 format_timestamp(fold.test_end)};
      return;
    }
    if (fold.n_train() == 0) {
      issue_slots[k] = FoldIssue{fold.index, "failed: no training rows in " +
                                                 format_timestamp(fold.train_start) + " .. " +
                                                 format_timestamp(fold.train_end)};
      return;
    }
    // Chronological sort plus contiguous windows imply this; checked on every run.
    if (!(table.rows[fold.train_last - 1].start_time < table.rows[fold.test_first].start_time)) {
      throw Error("internal: training rows overlap the test window in fold " +
                  std::to_string(fold.index));
    }

    const Matrix X_train = table.features(fold.train_first, fold.train_last);
    const auto y_train = table.targets(fold.train_first, fold.train_last);
    const Matrix X_test = table.features(fold.test_first, fold.test_last);
    const auto y_test = table.targets(fold.test_first, fold.test_last);

    std::optional<Model> model;
    std::vector<double> times;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, options.timing_repeats); ++rep) {
      times.push_back(timed([&] {
        Model fitted = factory.fit(X_train, y_train);
        if (!model) model.emplace(std::move(fitted));
      }));
    }
    const auto predicted = model->predict(X_test);

    RunResult r;
    r.scenario = spec.id;
    r.model = factory.name;
    r.target = table.target;
    r.fold = fold.index;
    r.n_train = fold.n_train();
    r.n_test = fold.n_test();
    r.mae = mae(y_test, predicted);
    r.rmse = rmse(y_test, predicted);
    r.fit_time = median(times);
    slots[k] = r;
  });

  ScenarioRun run;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    if (slots[k]) run.results.push_back(*slots[k]);
    if (issue_slots[k]) run.issues.push_back(*issue_slots[k]);
  }
  run.aggregate = aggregate_results(run.results);
  run.aggregate.scenario = spec.id;
  run.aggregate.model = factory.name;
  run.aggregate.target = table.target;
  return run;
}

std::vector<ScaleRow> run_scale_bench(const FeatureTable& table, const std::vector<std::size_t>& sizes,
                                      const std::vector<ModelFactory>& factories,
                                      std::size_t repeats) {
  for (const auto n : sizes) {
    if (n == 0) throw DataError("scale sizes must be positive");
    if (n > table.size()) {
      throw DataError("scale size " + std::to_string(n) + " exceeds the table (" +
                      std::to_string(table.size()) + " rows)");
    }
  }
  repeats = std::max<std::size_t>(1, repeats);
  std::vector<ScaleRow> rows;
  for (const auto& factory : factories) {
    for (const auto n : sizes) {
      const Matrix X = table.features(0, n);
      const auto y = table.targets(0, n);
      ScaleRow row;
      row.model = factory.name;
      row.n = n;
      for (std::size_t rep = 0; rep < repeats; ++rep) {
        row.repeat_times.push_back(timed([&] { (void)factory.fit(X, y); }));
      }
      row.fit_time = median(row.repeat_times);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace tripboost

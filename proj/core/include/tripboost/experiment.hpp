#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tripboost/featurize.hpp"
#include "tripboost/folds.hpp"
#include "tripboost/model.hpp"

namespace tripboost {

struct RunResult {
  int scenario = 0;
  std::string model;
  TargetKind target = TargetKind::Duration;
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double mae = 0.0;       // seconds
  double rmse = 0.0;      // seconds
  double fit_time = 0.0;  // wall-clock seconds, model fitting only
};

struct FoldIssue {
  std::size_t fold = 0;
  std::string reason;
};

struct Aggregate {
  int scenario = 0;
  std::string model;
  TargetKind target = TargetKind::Duration;
  std::size_t folds = 0;
  double mean_mae = 0.0;
  double mean_rmse = 0.0;
  double mean_fit_time = 0.0;
};

struct ScenarioRun {
  std::vector<RunResult> results;  // ascending fold index
  std::vector<FoldIssue> issues;   // skipped (no test rows) or failed (no train rows) folds
  Aggregate aggregate;             // unweighted means over `results`
};

struct RunOptions {
  std::size_t workers = 1;       // concurrent folds; 0 = machine parallelism
  std::size_t timing_repeats = 1;  // > 1 reports the median fit time
};

/// Per fold: fit on the training rows (timed), predict the test rows,
/// score. Folds without test rows are skipped and folds without training
/// rows fail; both are reported in `issues` and the run continues.
ScenarioRun run_scenario(const FeatureTable& table, const ScenarioSpec& spec,
                         const ModelFactory& factory, const RunOptions& options = {});

Aggregate aggregate_results(const std::vector<RunResult>& results);

struct ScaleRow {
  std::string model;
  std::size_t n = 0;
  double fit_time = 0.0;             // median over repeats
  std::vector<double> repeat_times;  // in execution order
};

inline const std::vector<std::size_t> kDefaultScaleSizes = {1000,  5000,   10000, 25000,
                                                            50000, 100000, 150000};

/// Fits every model on the first n chronological rows for each n, serially,
/// `repeats` times, reporting the median wall time. Throws DataError when a
/// size exceeds the table.
std::vector<ScaleRow> run_scale_bench(const FeatureTable& table, const std::vector<std::size_t>& sizes,
                                      const std::vector<ModelFactory>& factories,
                                      std::size_t repeats = 3);

double median(std::vector<double> values);

}  // namespace tripboost

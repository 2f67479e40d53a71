#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "tripboost/errors.hpp"
#include "tripboost/experiment.hpp"
#include "tripboost/folds.hpp"
#include "tripboost/metrics.hpp"
#include "tripboost/report.hpp"

using namespace tripboost;
using namespace std::chrono;

namespace {

FeatureRow row_at(Timestamp t, double target, std::size_t k) {
  FeatureRow r;
  r.trip_id = "R" + std::to_string(k);
  r.start_time = t;
  r.num_stops = 2 + static_cast<int>(k % 5);
  r.num_cities = 1;
  r.hour = static_cast<int>((t - floor<days>(t)) / hours{1});
  r.scheduled_duration = 3600.0 * static_cast<double>(k % 7);
  r.target = target;
  return r;
}

/// `per_day` rows on every day of [first, last), targets from `target(k)`.
template <typename TargetFn>
FeatureTable daily_table(sys_days first, sys_days last, int per_day, TargetFn target) {
  FeatureTable t;
  std::size_t k = 0;
  for (sys_days d = first; d < last; d += days{1})
    for (int j = 0; j < per_day; ++j, ++k) t.rows.push_back(row_at(d + hours{6 + 3 * j}, target(k), k));
  return t;
}

FeatureTable seven_months(int per_day = 2) {
  return daily_table(sys_days{year{2019} / 3 / 1}, sys_days{year{2019} / 10 / 1}, per_day,
                     [](std::size_t k) { return 1000.0 + static_cast<double>(k % 13); });
}

ModelFactory mean_model() {
  return {"mean", [](const Matrix&, std::span<const double> y) {
            TreeNode leaf;
            leaf.value = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
            leaf.count = y.size();
            return Model("mean", Tree({leaf}, kNumFeatures));
          }};
}

double oracle_mae(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(static_cast<long double>(a[i]) - b[i]);
  return static_cast<double>(s / a.size());
}

double oracle_rmse(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double e = static_cast<long double>(a[i]) - b[i];
    s += e * e;
  }
  return static_cast<double>(std::sqrt(s / a.size()));
}

void expect_partition(const FeatureTable& table, const std::vector<Fold>& folds, sys_days test_begin,
                      sys_days test_end) {
  ASSERT_FALSE(folds.empty());
  EXPECT_EQ(folds.front().test_start, Timestamp{test_begin});
  EXPECT_EQ(folds.back().test_end, Timestamp{test_end});
  for (std::size_t k = 0; k < folds.size(); ++k) {
    const Fold& f = folds[k];
    EXPECT_EQ(f.index, k);
    EXPECT_EQ(f.train_end, f.test_start);
    EXPECT_LT(f.train_start, f.train_end);
    EXPECT_LT(f.test_start, f.test_end);
    if (k > 0) EXPECT_EQ(folds[k - 1].test_end, f.test_start);
    for (std::size_t i = f.train_first; i < f.train_last; ++i) {
      ASSERT_GE(table.rows[i].start_time, f.train_start);
      ASSERT_LT(table.rows[i].start_time, f.train_end);
    }
    for (std::size_t i = f.test_first; i < f.test_last; ++i) {
      ASSERT_GE(table.rows[i].start_time, f.test_start);
      ASSERT_LT(table.rows[i].start_time, f.test_end);
    }
    // Ranges are maximal: neighbours fall outside.
    if (f.test_first > 0) EXPECT_LT(table.rows[f.test_first - 1].start_time, f.test_start);
    if (f.test_last < table.size()) EXPECT_GE(table.rows[f.test_last].start_time, f.test_end);
    if (f.n_train() > 0 && f.n_test() > 0)
      EXPECT_LT(table.rows[f.train_last - 1].start_time, table.rows[f.test_first].start_time);
  }
}

}  // namespace

TEST(Metrics, HandComputedValues) {
  const std::vector<double> y = {1, 2, 3}, p = {2, 2, 5};
  EXPECT_DOUBLE_EQ(mae(y, p), 1.0);
  EXPECT_NEAR(rmse(y, p), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(rmse(y, p), 1.29099, 1e-5);
  EXPECT_EQ(mae(y, y), 0.0);
  EXPECT_EQ(rmse(y, y), 0.0);
}

TEST(Metrics, MatchOracleAndPowerMeanInequality) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd(0, 100);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(1000), b(1000);
    for (auto& v : a) v = nd(gen);
    for (auto& v : b) v = nd(gen);
    const double m = mae(a, b), r = rmse(a, b);
    EXPECT_NEAR(m, oracle_mae(a, b), 1e-12 * oracle_mae(a, b));
    EXPECT_NEAR(r, oracle_rmse(a, b), 1e-12 * oracle_rmse(a, b));
    EXPECT_LE(m, r);
  }
}

TEST(Metrics, InvalidInputs) {
  EXPECT_THROW(mae(std::vector<double>{}, std::vector<double>{}), DataError);
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), DataError);
}

TEST(Scenarios, WindowDefinitions) {
  const auto s0 = ScenarioSpec::scenario(0);
  EXPECT_EQ(s0.unit, ScenarioSpec::Unit::Months);
  EXPECT_EQ(s0.test_length, 3);
  EXPECT_EQ(s0.train_length, 4);
  const std::pair<int, int> expected[] = {{1, 3}, {14, 42}, {7, 21}, {1, 3}};
  for (int id = 1; id <= 4; ++id) {
    const auto s = ScenarioSpec::scenario(id);
    EXPECT_EQ(s.train_length, 3 * s.test_length);
    EXPECT_EQ(s.test_length, expected[id - 1].first);
    EXPECT_EQ(s.unit, id == 1 ? ScenarioSpec::Unit::Months : ScenarioSpec::Unit::Days);
  }
  EXPECT_THROW(ScenarioSpec::scenario(5), ConfigError);
  EXPECT_THROW(ScenarioSpec::scenario(-1), ConfigError);
}

TEST(Folds, ScenarioZeroSingleFold) {
  const auto table = seven_months();
  const auto folds = make_folds(table, ScenarioSpec::scenario(0));
  ASSERT_EQ(folds.size(), 1u);
  EXPECT_EQ(folds[0].train_start, Timestamp{sys_days{year{2019} / 3 / 1}});
  EXPECT_EQ(folds[0].test_start, Timestamp{sys_days{year{2019} / 7 / 1}});
  EXPECT_EQ(folds[0].train_first, 0u);
  EXPECT_EQ(folds[0].test_last, table.size());
  EXPECT_EQ(folds[0].n_train(), 2u * (31 + 30 + 31 + 30));
}

TEST(Folds, ScenarioOneThreeMonthlyFolds) {
  const auto table = seven_months();
  const auto folds = make_folds(table, ScenarioSpec::scenario(1));
  ASSERT_EQ(folds.size(), 3u);
  EXPECT_EQ(folds[1].train_start, Timestamp{sys_days{year{2019} / 5 / 1}});
  EXPECT_EQ(folds[1].test_start, Timestamp{sys_days{year{2019} / 8 / 1}});
  EXPECT_EQ(folds[1].n_test(), 62u);
}

TEST(Folds, DayScenarioCounts) {
  const auto table = seven_months();
  // The final three months hold 31 + 31 + 30 = 92 days.
  EXPECT_EQ(make_folds(table, ScenarioSpec::scenario(2)).size(), 7u);   // 6 x 14 + 8
  EXPECT_EQ(make_folds(table, ScenarioSpec::scenario(3)).size(), 14u);  // 13 x 7 + 1
  const auto daily = make_folds(table, ScenarioSpec::scenario(4));
  EXPECT_EQ(daily.size(), 92u);
  for (const auto& f : daily) {
    EXPECT_EQ(f.test_end - f.test_start, days{1});
    EXPECT_EQ(f.train_end - f.train_start, days{3});
    EXPECT_EQ(f.n_test(), 2u);
    EXPECT_EQ(f.n_train(), 6u);
  }
  const auto weekly = make_folds(table, ScenarioSpec::scenario(3));
  EXPECT_EQ(weekly.back().test_end - weekly.back().test_start, days{1});
  EXPECT_EQ(weekly.front().train_end - weekly.front().train_start, days{21});
}

TEST(Folds, PartitionAndNoLeakageInEveryScenario) {
  const auto table = seven_months(3);
  for (int id = 0; id <= 4; ++id) {
    SCOPED_TRACE(id);
    expect_partition(table, make_folds(table, ScenarioSpec::scenario(id)),
                     sys_days{year{2019} / 7 / 1}, sys_days{year{2019} / 10 / 1});
  }
}

TEST(Folds, SpanEndsMidMonth) {
  // The span's last month is September even though data stops on the 20th.
  const auto table = daily_table(sys_days{year{2019} / 3 / 1}, sys_days{year{2019} / 9 / 21}, 1,
                                 [](std::size_t) { return 1.0; });
  const auto folds = make_folds(table, ScenarioSpec::scenario(1));
  ASSERT_EQ(folds.size(), 3u);
  EXPECT_EQ(folds.back().test_end, Timestamp{sys_days{year{2019} / 10 / 1}});
  EXPECT_EQ(folds.back().n_test(), 20u);
}

TEST(Folds, Errors) {
  EXPECT_THROW(make_folds(FeatureTable{}, ScenarioSpec::scenario(1)), DataError);
  const auto short_table = daily_table(sys_days{year{2019} / 5 / 1}, sys_days{year{2019} / 10 / 1}, 1,
                                       [](std::size_t) { return 1.0; });
  EXPECT_THROW(make_folds(short_table, ScenarioSpec::scenario(0)), DataError);  // 5 < 4 + 3 months
  EXPECT_THROW(make_folds(short_table, ScenarioSpec::scenario(1)), DataError);  // 5 < 3 + 3 months
  EXPECT_NO_THROW(make_folds(short_table, ScenarioSpec::scenario(4)));
  auto unsorted = seven_months();
  std::swap(unsorted.rows[0], unsorted.rows[100]);
  EXPECT_THROW(make_folds(unsorted, ScenarioSpec::scenario(1)), DataError);
}

TEST(RunScenario, MemorizerOnConstantDataIsExact) {
  const auto table = daily_table(sys_days{year{2019} / 3 / 1}, sys_days{year{2019} / 10 / 1}, 2,
                                 [](std::size_t) { return 4200.0; });
  for (int id : {0, 1, 3}) {
    const auto run = run_scenario(table, ScenarioSpec::scenario(id), make_factory("dt"));
    ASSERT_FALSE(run.results.empty());
    for (const auto& r : run.results) {
      EXPECT_EQ(r.mae, 0.0);
      EXPECT_EQ(r.rmse, 0.0);
      EXPECT_GE(r.fit_time, 0.0);
    }
  }
}

TEST(RunScenario, AggregateIsTheUnweightedFoldMean) {
  const auto table = seven_months();
  const auto run = run_scenario(table, ScenarioSpec::scenario(1), make_factory("hgb"));
  ASSERT_EQ(run.results.size(), 3u);
  EXPECT_TRUE(run.issues.empty());
  double m = 0, r = 0, t = 0;
  for (const auto& x : run.results) {
    m += x.mae / 3;
    r += x.rmse / 3;
    t += x.fit_time / 3;
    EXPECT_LE(x.mae, x.rmse);
    EXPECT_EQ(x.scenario, 1);
    EXPECT_EQ(x.model, "hgb");
  }
  EXPECT_NEAR(run.aggregate.mean_mae, m, 1e-12 * m);
  EXPECT_NEAR(run.aggregate.mean_rmse, r, 1e-12 * r);
  EXPECT_NEAR(run.aggregate.mean_fit_time, t, 1e-12 * std::max(t, 1e-300));
  EXPECT_EQ(run.aggregate.folds, 3u);
}

TEST(RunScenario, RepeatedAndParallelRunsGiveIdenticalMetrics) {
  const auto table = seven_months(3);
  ModelOptions o;
  o.n_estimators = 10;
  o.seed = 4;
  const auto run = [&](std::size_t workers) {
    RunOptions ro;
    ro.workers = workers;
    return run_scenario(table, ScenarioSpec::scenario(3), make_factory("rf", o), ro);
  };
  const auto a = run(1), b = run(1), c = run(3);
  ASSERT_EQ(a.results.size(), 14u);
  for (std::size_t k = 0; k < a.results.size(); ++k) {
    EXPECT_EQ(a.results[k].fold, k);
    EXPECT_EQ(a.results[k].mae, b.results[k].mae);
    EXPECT_EQ(a.results[k].rmse, b.results[k].rmse);
    EXPECT_EQ(a.results[k].mae, c.results[k].mae);
    EXPECT_EQ(a.results[k].rmse, c.results[k].rmse);
    EXPECT_EQ(a.results[k].n_train, c.results[k].n_train);
  }
}

TEST(RunScenario, EmptyFoldsAreReportedAndSkipped) {
  // Data in March and July to September only: the July fold has no training rows.
  auto table = daily_table(sys_days{year{2019} / 3 / 1}, sys_days{year{2019} / 3 / 10}, 2,
                           [](std::size_t k) { return static_cast<double>(k); });
  const auto late = daily_table(sys_days{year{2019} / 7 / 1}, sys_days{year{2019} / 10 / 1}, 2,
                                [](std::size_t k) { return static_cast<double>(k % 5); });
  for (auto r : late.rows) {
    r.trip_id = "L" + r.trip_id;
    table.rows.push_back(r);
  }
  const auto run = run_scenario(table, ScenarioSpec::scenario(1), mean_model());
  ASSERT_EQ(run.results.size(), 2u);
  ASSERT_EQ(run.issues.size(), 1u);
  EXPECT_EQ(run.issues[0].fold, 0u);
  EXPECT_NE(run.issues[0].reason.find("no training rows"), std::string::npos);

  // A calendar gap inside the test period: August has no rows at all.
  FeatureTable gap;
  for (const auto& r : seven_months().rows)
    if (civil_fields(r.start_time).month != 8) gap.rows.push_back(r);
  const auto gap_run = run_scenario(gap, ScenarioSpec::scenario(1), mean_model());
  ASSERT_EQ(gap_run.results.size(), 2u);
  ASSERT_EQ(gap_run.issues.size(), 1u);
  EXPECT_EQ(gap_run.issues[0].fold, 1u);
  EXPECT_NE(gap_run.issues[0].reason.find("no test rows"), std::string::npos);
}

TEST(ScaleBench, OneRowPerModelAndSize) {
  const auto table = daily_table(sys_days{year{2019} / 1 / 1}, sys_days{year{2019} / 12 / 31}, 420,
                                 [](std::size_t k) { return static_cast<double>(k % 97); });
  ASSERT_GE(table.size(), 150000u);
  const auto rows = run_scale_bench(table, kDefaultScaleSizes, {mean_model(), make_factory("lr")}, 3);
  ASSERT_EQ(rows.size(), 14u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].n, kDefaultScaleSizes[i % 7]);
    EXPECT_EQ(rows[i].repeat_times.size(), 3u);
    EXPECT_EQ(rows[i].fit_time, median(rows[i].repeat_times));
    EXPECT_GT(rows[i].fit_time, 0.0);
  }
  const auto one = run_scale_bench(table, {1000}, {make_factory("dt")}, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_GT(one[0].fit_time, 0.0);
  EXPECT_THROW(run_scale_bench(table, {table.size() + 1}, {mean_model()}), DataError);
}

TEST(ScaleBench, Median) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(Report, CsvLayouts) {
  RunResult r;
  r.scenario = 2;
  r.model = "gb";
  r.target = TargetKind::Delay;
  r.fold = 4;
  r.n_train = 10;
  r.n_test = 3;
  r.mae = 1.5;
  r.rmse = 2.25;
  r.fit_time = 0.125;
  std::ostringstream results;
  write_results_csv(results, {r});
  EXPECT_EQ(results.str(),
            "scenario,model,target,fold,n_train,n_test,mae_s,rmse_s,fit_time_s\n"
            "2,gb,delay,4,10,3,1.5,2.25,0.125\n");
  std::ostringstream agg;
  write_aggregates_csv(agg, {aggregate_results({r, r})});
  EXPECT_EQ(agg.str(),
            "scenario,model,target,folds,mean_mae_s,mean_rmse_s,mean_fit_time_s\n"
            "2,gb,delay,2,1.5,2.25,0.125\n");
  std::ostringstream scale;
  write_scale_csv(scale, {{"hgb", 1000, 0.5, {0.5}}});
  EXPECT_EQ(scale.str(), "model,n,fit_time_s\nhgb,1000,0.5\n");
}

TEST(Report, SvgHasOnePolylinePerModel) {
  const std::vector<ScaleRow> rows = {{"hgb", 1000, 0.01, {}}, {"hgb", 10000, 0.1, {}},
                                      {"gb", 1000, 0.2, {}},   {"gb", 10000, 3.0, {}}};
  std::ostringstream out;
  write_scale_svg(out, rows);
  const std::string svg = out.str();
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_NE(svg.find("log scale"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

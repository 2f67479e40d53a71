#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_util.hpp"
#include "tripboost/bins.hpp"
#include "tripboost/ensemble.hpp"
#include "tripboost/errors.hpp"
#include "tripboost/persist.hpp"
#include "tripboost/model.hpp"

using namespace tripboost;
using testutil::mse;

namespace {

struct Data {
  Matrix X;
  std::vector<double> y;
};

Data make_data(std::uint64_t seed, std::size_t n, std::size_t p, int levels = 30) {
  std::mt19937_64 gen(seed);
  Data d;
  d.X = testutil::random_matrix(gen, n, p, levels);
  d.y = testutil::target_for(gen, d.X, 1.0);
  return d;
}

// Independent weighted median: sort (value, weight) pairs, walk to half the mass.
double oracle_weighted_median(std::vector<double> v, std::vector<double> w) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double run = 0;
  for (auto i : order) {
    run += w[i];
    if (run >= 0.5 * total) return v[i];
  }
  return v[order.back()];
}

}  // namespace

TEST(Bagging, SingleTreeWithoutBootstrapIsTheTree) {
  const auto d = make_data(1, 200, 4);
  auto cfg = EnsembleConfig::bagging_defaults();
  cfg.n_estimators = 1;
  cfg.bootstrap = false;
  const auto model = fit_bagging(d.X, d.y, cfg);
  const Tree tree = fit_tree_exact(d.X, d.y, {}, cfg.tree);
  ASSERT_EQ(model.members.size(), 1u);
  EXPECT_EQ(model.members[0].tree, tree);
  EXPECT_EQ(model.predict(d.X), tree.predict(d.X));
}

TEST(Bagging, ConstantTarget) {
  auto d = make_data(2, 100, 3);
  std::fill(d.y.begin(), d.y.end(), -2.5);
  auto cfg = EnsembleConfig::bagging_defaults();
  cfg.n_estimators = 10;
  for (double p : fit_bagging(d.X, d.y, cfg).predict(d.X)) EXPECT_EQ(p, -2.5);
  for (double p : fit_random_forest(d.X, d.y, EnsembleConfig::forest_defaults()).predict(d.X))
    EXPECT_EQ(p, -2.5);
}

TEST(Bagging, BeatsSingleDepthLimitedTreeOnTrainingData) {
  int wins = 0;
  for (int rep = 0; rep < 20; ++rep) {
    std::mt19937_64 gen(100 + rep);
    Data d;
    d.X = testutil::gaussian_matrix(gen, 500, 5);
    d.y = testutil::target_for(gen, d.X, 1.0);
    auto cfg = EnsembleConfig::bagging_defaults();
    cfg.n_estimators = 50;
    cfg.tree.max_depth = 4;
    cfg.seed = static_cast<std::uint64_t>(rep);
    const double bag = mse(fit_bagging(d.X, d.y, cfg).predict(d.X), d.y);
    const double single = mse(fit_tree_exact(d.X, d.y, {}, cfg.tree).predict(d.X), d.y);
    wins += bag <= single;
  }
  EXPECT_GE(wins, 19);
}

TEST(Bagging, PredictionsStayWithinTargetRange) {
  const auto d = make_data(3, 300, 4);
  const auto [lo, hi] = std::minmax_element(d.y.begin(), d.y.end());
  auto cfg = EnsembleConfig::bagging_defaults();
  cfg.n_estimators = 20;
  std::mt19937_64 gen(4);
  const Matrix probe = testutil::random_matrix(gen, 200, 4, 40);
  for (const auto& model : {fit_bagging(d.X, d.y, cfg), fit_random_forest(d.X, d.y, EnsembleConfig::forest_defaults())}) {
    for (double p : model.predict(probe)) {
      EXPECT_GE(p, *lo);
      EXPECT_LE(p, *hi);
    }
  }
}

TEST(Bagging, ThreadCountDoesNotChangeTheModel) {
  const auto d = make_data(5, 300, 4);
  auto cfg = EnsembleConfig::forest_defaults();
  cfg.n_estimators = 12;
  cfg.seed = 99;
  cfg.workers = 1;
  const auto serial = fit_random_forest(d.X, d.y, cfg);
  cfg.workers = 4;
  const auto parallel = fit_random_forest(d.X, d.y, cfg);
  EXPECT_EQ(serial.members, parallel.members);
  EXPECT_EQ(serialize_model(Model("rf", serial)),
            serialize_model(Model("rf", parallel)));
}

TEST(RandomForest, FullSubsampleSingleTreeIsTheTree) {
  const auto d = make_data(6, 150, 5);
  auto cfg = EnsembleConfig::forest_defaults();
  cfg.n_estimators = 1;
  cfg.bootstrap = false;
  cfg.feature_subsample = 1.0;
  const auto model = fit_random_forest(d.X, d.y, cfg);
  EXPECT_EQ(model.predict(d.X), fit_tree_exact(d.X, d.y, {}, TreeConfig{}).predict(d.X));
}

TEST(RandomForest, FullSubsampleEqualsBagging) {
  const auto d = make_data(7, 250, 5);
  auto cfg = EnsembleConfig::forest_defaults();
  cfg.feature_subsample = 1.0;
  cfg.n_estimators = 15;
  cfg.seed = 17;
  auto bag_cfg = EnsembleConfig::bagging_defaults();
  bag_cfg.n_estimators = 15;
  bag_cfg.seed = 17;
  const auto rf = fit_random_forest(d.X, d.y, cfg);
  const auto br = fit_bagging(d.X, d.y, bag_cfg);
  EXPECT_EQ(rf.members, br.members);
  EXPECT_EQ(rf.predict(d.X), br.predict(d.X));
}

TEST(RandomForest, SubsamplingChangesTheTreesDeterministically) {
  const auto d = make_data(8, 250, 10);
  auto cfg = EnsembleConfig::forest_defaults();
  cfg.n_estimators = 5;
  cfg.seed = 1;
  const auto a = fit_random_forest(d.X, d.y, cfg);
  EXPECT_EQ(fit_random_forest(d.X, d.y, cfg).members, a.members);
  TreeConfig member = a.config.tree;
  member.feature_subsample = a.config.feature_subsample;
  EXPECT_EQ(member.features_per_node(10), 4u);
  cfg.feature_subsample = 1.0;
  EXPECT_NE(fit_random_forest(d.X, d.y, cfg).members, a.members);
}

TEST(Gbm, ConstantTargetGivesZeroLeaves) {
  auto d = make_data(9, 80, 3);
  std::fill(d.y.begin(), d.y.end(), 12.0);
  auto cfg = EnsembleConfig::boosting_defaults();
  cfg.n_estimators = 5;
  for (auto mode : {SplitMode::Exact, SplitMode::Histogram}) {
    const auto m = fit_gbm(d.X, d.y, cfg, mode);
    EXPECT_EQ(m.base_prediction, 12.0);
    for (const auto& member : m.members) {
      ASSERT_EQ(member.tree.nodes().size(), 1u);
      EXPECT_EQ(member.tree.nodes()[0].value, 0.0);
    }
    for (double p : m.predict(d.X)) EXPECT_EQ(p, 12.0);
  }
}

TEST(Gbm, UnitRateUnlimitedDepthInterpolatesInOneStage) {
  std::mt19937_64 gen(10);
  const Matrix X = testutil::gaussian_matrix(gen, 120, 3);
  const auto y = testutil::target_for(gen, X);
  auto cfg = EnsembleConfig::boosting_defaults();
  cfg.n_estimators = 1;
  cfg.learning_rate = 1.0;
  cfg.tree.max_depth = TreeConfig::kUnlimitedDepth;
  const auto m = fit_gbm(X, y, cfg, SplitMode::Exact);
  EXPECT_LT(m.stage_train_mse.back(), 1e-20);
  EXPECT_LT(mse(m.predict(X), y), 1e-20);
}

TEST(Gbm, TwoPointTwoStageRecursion) {
  const Matrix X = {{0}, {1}};
  const std::vector<double> y = {0, 10};
  auto cfg = EnsembleConfig::boosting_defaults();
  cfg.n_estimators = 2;
  cfg.learning_rate = 0.5;
  cfg.tree.max_depth = 1;
  for (auto mode : {SplitMode::Exact, SplitMode::Histogram}) {
    const auto m = fit_gbm(X, y, cfg, mode);
    EXPECT_EQ(m.base_prediction, 5.0);
    ASSERT_EQ(m.members.size(), 2u);
    EXPECT_EQ(m.members[0].tree.nodes()[1].value, -5.0);
    EXPECT_EQ(m.members[0].tree.nodes()[2].value, 5.0);
    EXPECT_EQ(m.members[1].tree.nodes()[1].value, -2.5);
    EXPECT_EQ(m.predict(X), (std::vector<double>{1.25, 8.75}));
    EXPECT_EQ(m.stage_train_mse, (std::vector<double>{25.0, 6.25, 1.5625}));
  }
}

TEST(Gbm, TrainingLossNeverIncreases) {
  for (int rep = 0; rep < 8; ++rep) {
    const auto d = make_data(200 + rep, 300, 4, 50);
    for (double nu : {0.1, 1.0, 1.9}) {
      auto cfg = EnsembleConfig::boosting_defaults();
      cfg.n_estimators = 30;
      cfg.learning_rate = nu;
      const auto m = fit_gbm(d.X, d.y, cfg, SplitMode::Histogram);
      ASSERT_EQ(m.stage_train_mse.size(), 31u);
      for (std::size_t s = 1; s < m.stage_train_mse.size(); ++s) {
        EXPECT_LE(m.stage_train_mse[s], m.stage_train_mse[s - 1] * (1 + 1e-12)) << nu << " " << s;
      }
      EXPECT_NEAR(m.stage_train_mse.back(), mse(m.predict(d.X), d.y), 1e-9 * m.stage_train_mse.back());
    }
  }
}

TEST(Gbm, HistogramEqualsExactWhenValuesFitInBins) {
  for (int rep = 0; rep < 5; ++rep) {
    const auto d = make_data(300 + rep, 400, 5, 40);
    auto cfg = EnsembleConfig::boosting_defaults();
    cfg.n_estimators = 25;
    const auto h = fit_gbm(d.X, d.y, cfg, SplitMode::Histogram);
    const auto e = fit_gbm(d.X, d.y, cfg, SplitMode::Exact);
    EXPECT_EQ(h.members, e.members);
    EXPECT_EQ(h.predict(d.X), e.predict(d.X));
    EXPECT_EQ(h.kind, EnsembleKind::GbmHist);
    EXPECT_TRUE(h.bins.has_value());
    EXPECT_FALSE(e.bins.has_value());
  }
}

TEST(Gbm, ArityMismatchThrows) {
  const auto d = make_data(11, 50, 3);
  const auto m = fit_gbm(d.X, d.y, EnsembleConfig::boosting_defaults(), SplitMode::Exact);
  const double x[] = {1, 2};
  EXPECT_THROW(m.predict(x), DataError);
}

TEST(AdaBoost, PerfectFirstLearnerStopsTheLoop) {
  // Two well-separated groups, depth-1 tree fits them exactly.
  Matrix X(40, 1);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    X(i, 0) = static_cast<double>(i);
    y[i] = i < 20 ? 1.0 : 9.0;
  }
  auto cfg = EnsembleConfig::boosting_defaults();
  cfg.tree.max_depth = 1;
  cfg.n_estimators = 50;
  cfg.seed = 3;
  const auto m = fit_adaboost_r2(X, y, cfg);
  ASSERT_EQ(m.members.size(), 1u);
  EXPECT_NEAR(m.members[0].weight, std::log(1.0 / kPerfectLearnerLoss), 1e-12);
  EXPECT_EQ(m.predict(X), m.members[0].tree.predict(X));
}

TEST(AdaBoost, ConstantTarget) {
  auto d = make_data(12, 60, 2);
  std::fill(d.y.begin(), d.y.end(), 3.0);
  const auto m = fit_adaboost_r2(d.X, d.y, EnsembleConfig::boosting_defaults());
  EXPECT_EQ(m.members.size(), 1u);
  for (double p : m.predict(d.X)) EXPECT_EQ(p, 3.0);
}

TEST(AdaBoost, PredictionIsWeightedMedianOfMembers) {
  for (auto loss : {AdaLoss::Linear, AdaLoss::Square, AdaLoss::Exponential}) {
    const auto d = make_data(13, 200, 4, 25);
    auto cfg = EnsembleConfig::boosting_defaults();
    cfg.n_estimators = 30;
    cfg.loss = loss;
    cfg.seed = 5;
    const auto m = fit_adaboost_r2(d.X, d.y, cfg);
    ASSERT_GT(m.members.size(), 1u);
    for (const auto& member : m.members) EXPECT_GT(member.weight, 0.0);
    for (std::size_t i = 0; i < d.X.rows(); ++i) {
      std::vector<double> v, w;
      for (const auto& member : m.members) {
        v.push_back(member.tree.predict(d.X.row(i)));
        w.push_back(member.weight);
      }
      ASSERT_EQ(m.predict(d.X.row(i)), oracle_weighted_median(v, w));
    }
  }
}

TEST(AdaBoost, SeedDeterminism) {
  const auto d = make_data(14, 150, 3);
  auto cfg = EnsembleConfig::boosting_defaults();
  cfg.n_estimators = 10;
  cfg.seed = 8;
  EXPECT_EQ(fit_adaboost_r2(d.X, d.y, cfg).members, fit_adaboost_r2(d.X, d.y, cfg).members);
  cfg.seed = 9;
  const auto other = fit_adaboost_r2(d.X, d.y, cfg);
  cfg.seed = 8;
  EXPECT_NE(fit_adaboost_r2(d.X, d.y, cfg).members, other.members);
}

TEST(WeightedMedian, SmallCases) {
  const std::vector<double> v = {3, 1, 2};
  EXPECT_EQ(weighted_median(v, std::vector<double>{1, 1, 1}), 2.0);
  EXPECT_EQ(weighted_median(v, std::vector<double>{10, 1, 1}), 3.0);
  EXPECT_EQ(weighted_median(v, std::vector<double>{1, 1, 0}), 1.0);  // cumulative 1 reaches half of 2
  std::mt19937_64 gen(15);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> vals(1 + rep % 9), ws(vals.size());
    for (auto& x : vals) x = std::round(u(gen) * 5);
    for (auto& x : ws) x = u(gen) + 0.01;
    ASSERT_EQ(weighted_median(vals, ws), oracle_weighted_median(vals, ws));
  }
}

TEST(EnsembleConfig, Validation) {
  auto cfg = EnsembleConfig::boosting_defaults();
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.learning_rate = 2.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = EnsembleConfig::bagging_defaults();
  cfg.n_estimators = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(fit_bagging(Matrix(0, 2), std::vector<double>{}, EnsembleConfig::bagging_defaults()),
               DataError);
  EXPECT_EQ(EnsembleConfig::forest_defaults().feature_subsample, 1.0 / 3.0);
  EXPECT_EQ(EnsembleConfig::boosting_defaults().tree.max_depth, 3);
  EXPECT_EQ(parse_ensemble_kind("gbm_hist"), EnsembleKind::GbmHist);
  EXPECT_EQ(parse_ada_loss("square"), AdaLoss::Square);
  EXPECT_THROW(parse_ada_loss("huber"), ConfigError);
}

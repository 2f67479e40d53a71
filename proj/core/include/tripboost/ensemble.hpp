#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tripboost/bins.hpp"
#include "tripboost/matrix.hpp"
#include "tripboost/tree.hpp"

namespace tripboost {

enum class EnsembleKind { Bagging, RandomForest, GbmExact, GbmHist, AdaBoostR2 };
enum class AdaLoss { Linear, Square, Exponential };

const char* to_string(EnsembleKind k);
EnsembleKind parse_ensemble_kind(std::string_view text);
const char* to_string(AdaLoss l);
AdaLoss parse_ada_loss(std::string_view text);

struct EnsembleConfig {
  int n_estimators = 100;
  double learning_rate = 0.1;  // boosting only, (0, 2]
  TreeConfig tree{};
  bool bootstrap = true;           // bagging / forest
  double feature_subsample = 1.0;  // copied into member tree configs
  AdaLoss loss = AdaLoss::Linear;  // AdaBoost.R2 only
  std::uint64_t seed = 0;
  std::size_t workers = 1;  // bagging / forest member fits; 0 = machine parallelism

  /// Unlimited depth, bootstrap, all features.
  static EnsembleConfig bagging_defaults();
  /// Unlimited depth, bootstrap, one third of the features per node.
  static EnsembleConfig forest_defaults();
  /// Depth-3 trees, learning rate 0.1.
  static EnsembleConfig boosting_defaults();

  void validate() const;
};

struct EnsembleMember {
  Tree tree;
  double weight = 1.0;  // > 0

  bool operator==(const EnsembleMember&) const = default;
};

struct EnsembleModel {
  EnsembleKind kind = EnsembleKind::Bagging;
  EnsembleConfig config{};
  double base_prediction = 0.0;  // boosting: mean training target
  std::vector<EnsembleMember> members;
  std::optional<BinMap> bins;    // GbmHist only
  /// Boosting: training MSE before the first stage and after each stage.
  std::vector<double> stage_train_mse;

  /// Bagging / forest: member mean. GBM: base + sum of weight * tree.
  /// AdaBoost.R2: weighted median of member predictions.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;

  std::size_t arity() const { return members.empty() ? 0 : members.front().tree.arity(); }
};

/// Each member fits on a bootstrap resample (or the full data when
/// bootstrap is off) drawn from its own substream of `cfg.seed`.
EnsembleModel fit_bagging(const Matrix& X, std::span<const double> y, const EnsembleConfig& cfg);

/// Bagging with per-node feature subsampling at `cfg.feature_subsample`.
EnsembleModel fit_random_forest(const Matrix& X, std::span<const double> y,
                                const EnsembleConfig& cfg);

enum class SplitMode { Exact, Histogram };

/// Least-squares gradient boosting: F0 = mean(y); each stage fits a tree to
/// the residuals and adds learning_rate times it.
EnsembleModel fit_gbm(const Matrix& X, std::span<const double> y, const EnsembleConfig& cfg,
                      SplitMode mode);

/// AdaBoost.R2 with weighted-bootstrap resampling and weighted-median
/// combination.
EnsembleModel fit_adaboost_r2(const Matrix& X, std::span<const double> y,
                              const EnsembleConfig& cfg);

/// Weighted median used by AdaBoost.R2: the smallest value whose cumulative
/// weight reaches half of the total. Ties in value keep input order.
double weighted_median(std::span<const double> values, std::span<const double> weights);

/// Stage weight assigned to a learner with (near) zero average loss.
inline constexpr double kPerfectLearnerLoss = 1e-10;

}  // namespace tripboost

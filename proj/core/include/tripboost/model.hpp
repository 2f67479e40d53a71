#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tripboost/ensemble.hpp"
#include "tripboost/linear.hpp"
#include "tripboost/matrix.hpp"
#include "tripboost/tree.hpp"

namespace tripboost {

/// Any fitted regressor behind one fit/predict contract.
class Model {
 public:
  using Variant = std::variant<Tree, EnsembleModel, LinearModel>;

  Model(std::string name, Variant fitted) : name_(std::move(name)), fitted_(std::move(fitted)) {}

  /// Registry abbreviation the model was built from (e.g. "hgb").
  const std::string& name() const { return name_; }
  const Variant& fitted() const { return fitted_; }

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;

 private:
  std::string name_;
  Variant fitted_;
};

/// Hyperparameters shared by the registry factories. Every default is a
/// declared choice.
struct ModelOptions {
  int n_estimators = 100;
  double learning_rate = 0.1;
  int boosting_max_depth = 3;
  int tree_max_depth = TreeConfig::kUnlimitedDepth;  // dt, br, rf
  int max_bins = 255;
  double ridge_lambda = 1.0;
  double lasso_lambda_ratio = 0.1;  // lambda = ratio * lambda_max of the training data
  AdaLoss ada_loss = AdaLoss::Linear;
  std::uint64_t seed = 0;
  std::size_t workers = 1;  // member-level parallelism inside bagging / forest
};

using FitFunction = std::function<Model(const Matrix&, std::span<const double>)>;

struct ModelFactory {
  std::string name;
  FitFunction fit;
};

/// Abbreviations with a fit-capable factory, in registry order:
/// lr ri la dt br rf gb ab hgb.
const std::vector<std::string>& registered_models();

/// Names that refer to vendor libraries outside this engine (xgb, cb, lgb).
const std::vector<std::string>& reserved_models();

/// Throws ConfigError for reserved names (citing out-of-scope status) and
/// for unknown names (listing the valid ones).
ModelFactory make_factory(std::string_view abbreviation, const ModelOptions& opts = {});

/// Linear models one-hot encode day_type over the fixed feature layout.
LinearOptions feature_table_linear_options();

}  // namespace tripboost

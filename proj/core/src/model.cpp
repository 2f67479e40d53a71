#include "tripboost/model.hpp"

#include <algorithm>
#include <sstream>

#include "tripboost/errors.hpp"
#include "tripboost/featurize.hpp"

namespace tripboost {

double Model::predict(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.predict(x); }, fitted_);
}

std::vector<double> Model::predict(const Matrix& X) const {
  return std::visit([&](const auto& m) { return m.predict(X); }, fitted_);
}

const std::vector<std::string>& registered_models() {
  static const std::vector<std::string> names = {"lr", "ri", "la", "dt", "br",
                                                 "rf", "gb", "ab", "hgb"};
  return names;
}

const std::vector<std::string>& reserved_models() {
  static const std::vector<std::string> names = {"xgb", "cb", "lgb"};
  return names;
}

LinearOptions feature_table_linear_options() {
  return LinearOptions{{OneHotSpec{kDayTypeColumn, 7}}};
}

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::ostringstream out;
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  return out.str();
}

EnsembleConfig boosting_config(const ModelOptions& o) {
  EnsembleConfig cfg = EnsembleConfig::boosting_defaults();
  cfg.n_estimators = o.n_estimators;
  cfg.learning_rate = o.learning_rate;
  cfg.tree.max_depth = o.boosting_max_depth;
  cfg.tree.max_bins = o.max_bins;
  cfg.loss = o.ada_loss;
  cfg.seed = o.seed;
  return cfg;
}

EnsembleConfig averaging_config(EnsembleConfig cfg, const ModelOptions& o) {
  cfg.n_estimators = o.n_estimators;
  cfg.tree.max_depth = o.tree_max_depth;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  return cfg;
}

}  // namespace

ModelFactory make_factory(std::string_view abbreviation, const ModelOptions& o) {
  const std::string name(abbreviation);
  const auto& reserved = reserved_models();
  if (std::find(reserved.begin(), reserved.end(), name) != reserved.end()) {
    throw ConfigError("model '" + name +
                      "' names a vendor boosting library whose internals are out of scope for "
                      "this engine; use 'hgb' (histogram GBM) or 'gb' (exact GBM) instead");
  }
  const LinearOptions lin = feature_table_linear_options();

  FitFunction fit;
  if (name == "lr") {
    fit = [lin](const Matrix& X, std::span<const double> y) { return Model("lr", fit_ols(X, y, lin)); };
  } else if (name == "ri") {
    fit = [lin, o](const Matrix& X, std::span<const double> y) {
      return Model("ri", fit_ridge(X, y, o.ridge_lambda, lin));
    };
  } else if (name == "la") {
    fit = [lin, o](const Matrix& X, std::span<const double> y) {
      const double lambda = o.lasso_lambda_ratio * lasso_lambda_max(X, y, lin);
      return Model("la", fit_lasso(X, y, lambda, lin));
    };
  } else if (name == "dt") {
    fit = [o](const Matrix& X, std::span<const double> y) {
      TreeConfig cfg;
      cfg.max_depth = o.tree_max_depth;
      cfg.seed = o.seed;
      return Model("dt", fit_tree_exact(X, y, {}, cfg));
    };
  } else if (name == "br") {
    fit = [o](const Matrix& X, std::span<const double> y) {
      return Model("br", fit_bagging(X, y, averaging_config(EnsembleConfig::bagging_defaults(), o)));
    };
  } else if (name == "rf") {
    fit = [o](const Matrix& X, std::span<const double> y) {
      return Model("rf", fit_random_forest(X, y, averaging_config(EnsembleConfig::forest_defaults(), o)));
    };
  } else if (name == "gb") {
    fit = [o](const Matrix& X, std::span<const double> y) {
      return Model("gb", fit_gbm(X, y, boosting_config(o), SplitMode::Exact));
    };
  } else if (name == "ab") {
    fit = [o](const Matrix& X, std::span<const double> y) {
      return Model("ab", fit_adaboost_r2(X, y, boosting_config(o)));
    };
  } else if (name == "hgb") {
    fit = [o](const Matrix& X, std::span<const double> y) {
      return Model("hgb", fit_gbm(X, y, boosting_config(o), SplitMode::Histogram));
    };
  } else {
    throw ConfigError("unknown model '" + name + "'; valid models: " + joined(registered_models()));
  }
  return ModelFactory{name, std::move(fit)};
}

}  // namespace tripboost

#include "tripboost/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tripboost/errors.hpp"
#include "tripboost/parallel.hpp"
#include "tripboost/rng.hpp"

namespace tripboost {

const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::Bagging: return "bagging";
    case EnsembleKind::RandomForest: return "random_forest";
    case EnsembleKind::GbmExact: return "gbm_exact";
    case EnsembleKind::GbmHist: return "gbm_hist";
    case EnsembleKind::AdaBoostR2: return "adaboost_r2";
  }
  return "?";
}

EnsembleKind parse_ensemble_kind(std::string_view text) {
  for (const auto k : {EnsembleKind::Bagging, EnsembleKind::RandomForest, EnsembleKind::GbmExact,
                       EnsembleKind::GbmHist, EnsembleKind::AdaBoostR2}) {
    if (text == to_string(k)) return k;
  }
  throw FormatError("unknown ensemble kind '" + std::string(text) + "'");
}

const char* to_string(AdaLoss l) {
  switch (l) {
    case AdaLoss::Linear: return "linear";
    case AdaLoss::Square: return "square";
    case AdaLoss::Exponential: return "exponential";
  }
  return "?";
}

AdaLoss parse_ada_loss(std::string_view text) {
  for (const auto l : {AdaLoss::Linear, AdaLoss::Square, AdaLoss::Exponential}) {
    if (text == to_string(l)) return l;
  }
  throw ConfigError("unknown AdaBoost loss '" + std::string(text) + "'");
}

EnsembleConfig EnsembleConfig::bagging_defaults() { return EnsembleConfig{}; }

EnsembleConfig EnsembleConfig::forest_defaults() {
  EnsembleConfig cfg;
  cfg.feature_subsample = 1.0 / 3.0;
  return cfg;
}

EnsembleConfig EnsembleConfig::boosting_defaults() {
  EnsembleConfig cfg;
  cfg.tree.max_depth = 3;
  cfg.bootstrap = false;
  return cfg;
}

void EnsembleConfig::validate() const {
  if (n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 2.0)) {
    throw ConfigError("learning_rate must lie in (0, 2]");
  }
  if (!(feature_subsample > 0.0 && feature_subsample <= 1.0)) {
    throw ConfigError("feature_subsample must lie in (0, 1]");
  }
  tree.validate();
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cum = 0.0;
  for (const auto i : order) {
    cum += weights[i];
    if (cum >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

double EnsembleModel::predict(std::span<const double> x) const {
  if (members.empty()) throw DataError("ensemble has no members");
  switch (kind) {
    case EnsembleKind::Bagging:
    case EnsembleKind::RandomForest: {
      double sum = 0.0;
      for (const auto& m : members) sum += m.tree.predict(x);
      return sum / static_cast<double>(members.size());
    }
    case EnsembleKind::GbmExact:
    case EnsembleKind::GbmHist: {
      double f = base_prediction;
      for (const auto& m : members) f += m.weight * m.tree.predict(x);
      return f;
    }
    case EnsembleKind::AdaBoostR2: {
      std::vector<double> preds, weights;
      preds.reserve(members.size());
      weights.reserve(members.size());
      for (const auto& m : members) {
        preds.push_back(m.tree.predict(x));
        weights.push_back(m.weight);
      }
      return weighted_median(preds, weights);
    }
  }
  return 0.0;
}

std::vector<double> EnsembleModel::predict(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

namespace {

void check_data(const Matrix& X, std::span<const double> y) {
  if (X.empty()) throw DataError("cannot fit an ensemble on empty data");
  if (y.size() != X.rows()) throw DataError("target length does not match the feature rows");
}

SampleIndices bootstrap_sample(std::size_t n, Rng& rng) {
  SampleIndices s(n);
  for (auto& i : s) i = static_cast<std::uint32_t>(rng.uniform_index(n));
  std::sort(s.begin(), s.end());
  return s;
}

SampleIndices weighted_bootstrap(std::span<const double> weights, Rng& rng) {
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  const double total = cdf.back();
  SampleIndices s(weights.size());
  for (auto& i : s) {
    const double u = rng.uniform() * total;
    const auto pos = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    i = static_cast<std::uint32_t>(std::min(pos, weights.size() - 1));
  }
  std::sort(s.begin(), s.end());
  return s;
}

TreeConfig member_tree_config(const EnsembleConfig& cfg, std::uint64_t member) {
  TreeConfig t = cfg.tree;
  t.feature_subsample = cfg.feature_subsample;
  t.seed = derive_seed(cfg.seed, {2, member});
  return t;
}

EnsembleModel fit_averaging(const Matrix& X, std::span<const double> y, const EnsembleConfig& cfg,
                            EnsembleKind kind) {
  cfg.validate();
  check_data(X, y);
  const ColumnMatrix cols(X);
  const std::size_t n = X.rows();

  EnsembleModel model;
  model.kind = kind;
  model.config = cfg;
  model.members.resize(static_cast<std::size_t>(cfg.n_estimators));
  parallel_for(model.members.size(), cfg.workers, [&](std::size_t m) {
    SampleIndices samples;
    if (cfg.bootstrap) {
      Rng rng = Rng::substream(cfg.seed, {1, m});
      samples = bootstrap_sample(n, rng);
    } else {
      samples = all_rows(n);
    }
    model.members[m] = EnsembleMember{fit_tree_exact(cols, y, {}, samples, member_tree_config(cfg, m)), 1.0};
  });
  return model;
}

double mse(std::span<const double> y, std::span<const double> f) {
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - f[i]) * (y[i] - f[i]);
  return ss / static_cast<double>(y.size());
}

}  // namespace

EnsembleModel fit_bagging(const Matrix& X, std::span<const double> y, const EnsembleConfig& cfg) {
  return fit_averaging(X, y, cfg, EnsembleKind::Bagging);
}

EnsembleModel fit_random_forest(const Matrix& X, std::span<const double> y,
                                const EnsembleConfig& cfg) {
  return fit_averaging(X, y, cfg, EnsembleKind::RandomForest);
}

EnsembleModel fit_gbm(const Matrix& X, std::span<const double> y, const EnsembleConfig& cfg,
                      SplitMode mode) {
  cfg.validate();
  check_data(X, y);
  const std::size_t n = X.rows();

  EnsembleModel model;
  model.kind = mode == SplitMode::Exact ? EnsembleKind::GbmExact : EnsembleKind::GbmHist;
  model.config = cfg;
  model.base_prediction = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  ColumnMatrix cols;
  BinnedMatrix binned;
  if (mode == SplitMode::Exact) {
    cols = ColumnMatrix(X);
  } else {
    model.bins = build_bins(X, cfg.tree.max_bins);
    binned = BinnedMatrix(*model.bins, X);
  }

  const SampleIndices samples = all_rows(n);
  std::vector<double> f(n, model.base_prediction);
  std::vector<double> residual(n);
  model.stage_train_mse.push_back(mse(y, f));
  model.members.reserve(static_cast<std::size_t>(cfg.n_estimators));
  for (int stage = 0; stage < cfg.n_estimators; ++stage) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - f[i];
    TreeConfig tcfg = member_tree_config(cfg, static_cast<std::uint64_t>(stage));
    Tree tree = mode == SplitMode::Exact
                    ? fit_tree_exact(cols, residual, {}, samples, tcfg)
                    : fit_tree_hist(binned, *model.bins, residual, {}, samples, tcfg);
    for (std::size_t i = 0; i < n; ++i) f[i] += cfg.learning_rate * tree.predict(X.row(i));
    model.stage_train_mse.push_back(mse(y, f));
    model.members.push_back({std::move(tree), cfg.learning_rate});
  }
  return model;
}

EnsembleModel fit_adaboost_r2(const Matrix& X, std::span<const double> y,
                              const EnsembleConfig& cfg) {
  cfg.validate();
  check_data(X, y);
  const std::size_t n = X.rows();
  const ColumnMatrix cols(X);

  EnsembleModel model;
  model.kind = EnsembleKind::AdaBoostR2;
  model.config = cfg;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> loss(n);
  for (int stage = 0; stage < cfg.n_estimators; ++stage) {
    Rng rng = Rng::substream(cfg.seed, {3, static_cast<std::uint64_t>(stage)});
    const SampleIndices samples = weighted_bootstrap(w, rng);
    Tree tree = fit_tree_exact(cols, y, {}, samples,
                               member_tree_config(cfg, static_cast<std::uint64_t>(stage)));

    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      loss[i] = std::abs(y[i] - tree.predict(X.row(i)));
      max_err = std::max(max_err, loss[i]);
    }
    double avg_loss = 0.0;
    if (max_err > 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double l = loss[i] / max_err;
        switch (cfg.loss) {
          case AdaLoss::Linear: loss[i] = l; break;
          case AdaLoss::Square: loss[i] = l * l; break;
          case AdaLoss::Exponential: loss[i] = 1.0 - std::exp(-l); break;
        }
        avg_loss += w[i] * loss[i];
      }
    }

    if (avg_loss < kPerfectLearnerLoss) {
      model.members.push_back({std::move(tree), std::log(1.0 / kPerfectLearnerLoss)});
      break;
    }
    if (avg_loss >= 0.5) {
      // A learner no better than chance ends boosting; the first one is kept
      // so the model always has a member.
      if (model.members.empty()) model.members.push_back({std::move(tree), 1.0});
      break;
    }
    const double beta = avg_loss / (1.0 - avg_loss);
    model.members.push_back({std::move(tree), std::log(1.0 / beta)});

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, 1.0 - loss[i]);
      total += w[i];
    }
    for (auto& wi : w) wi /= total;
  }
  return model;
}

}  // namespace tripboost

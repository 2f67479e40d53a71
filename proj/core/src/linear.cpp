#include "tripboost/linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tripboost/errors.hpp"

namespace tripboost {

const char* to_string(Penalty p) {
  switch (p) {
    case Penalty::None: return "none";
    case Penalty::Ridge: return "l2";
    case Penalty::Lasso: return "l1";
  }
  return "?";
}

Penalty parse_penalty(std::string_view text) {
  for (const auto p : {Penalty::None, Penalty::Ridge, Penalty::Lasso}) {
    if (text == to_string(p)) return p;
  }
  throw FormatError("unknown penalty '" + std::string(text) + "'");
}

namespace {

std::size_t expanded_arity(std::size_t arity, const std::vector<OneHotSpec>& one_hot) {
  std::size_t out = arity;
  for (const auto& spec : one_hot) out += static_cast<std::size_t>(spec.levels - 1) - 1;
  return out;
}

void expand_into(std::span<const double> x, const std::vector<OneHotSpec>& one_hot,
                 std::span<double> out) {
  std::size_t k = 0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const bool encoded = std::any_of(one_hot.begin(), one_hot.end(),
                                     [&](const OneHotSpec& s) { return s.column == c; });
    if (!encoded) out[k++] = x[c];
  }
  for (const auto& spec : one_hot) {
    const double v = x[spec.column];
    for (int level = 1; level < spec.levels; ++level) out[k++] = v == level ? 1.0 : 0.0;
  }
}

struct Standardized {
  Matrix z;  // n x p, standardised expanded features
  std::vector<double> means, scales;
  std::vector<bool> constant;
  std::vector<double> centred_y;
  double y_mean = 0.0;
  double y_sd = 0.0;
};

Standardized standardize(const Matrix& X, std::span<const double> y,
                         const std::vector<OneHotSpec>& one_hot) {
  if (X.empty()) throw DataError("cannot fit a linear model on empty data");
  if (y.size() != X.rows()) throw DataError("target length does not match the feature rows");
  for (const auto& s : one_hot) {
    if (s.column >= X.cols() || s.levels < 2) throw ConfigError("invalid one-hot specification");
  }
  Standardized st;
  st.z = expand_features(X, one_hot);
  const std::size_t n = st.z.rows();
  const std::size_t p = st.z.cols();
  const auto dn = static_cast<double>(n);
  st.means.assign(p, 0.0);
  st.scales.assign(p, 1.0);
  st.constant.assign(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += st.z(i, j);
    mean /= dn;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (st.z(i, j) - mean) * (st.z(i, j) - mean);
    var /= dn;
    const double sd = std::sqrt(var);
    st.means[j] = mean;
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      st.constant[j] = true;
      st.scales[j] = 1.0;
    } else {
      st.scales[j] = sd;
    }
    for (std::size_t i = 0; i < n; ++i) {
      st.z(i, j) = st.constant[j] ? 0.0 : (st.z(i, j) - mean) / st.scales[j];
    }
  }
  st.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / dn;
  st.centred_y.resize(n);
  double yss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st.centred_y[i] = y[i] - st.y_mean;
    yss += st.centred_y[i] * st.centred_y[i];
  }
  st.y_sd = std::sqrt(yss / dn);
  return st;
}

LinearModel finish(Standardized& st, std::vector<double> beta, Penalty penalty, double lambda,
                   const std::vector<OneHotSpec>& one_hot, std::size_t arity) {
  LinearModel m;
  m.penalty = penalty;
  m.lambda = lambda;
  m.one_hot = one_hot;
  m.input_arity = arity;
  m.means = std::move(st.means);
  m.scales = std::move(st.scales);
  m.standardized_coefficients = std::move(beta);
  m.target_mean = st.y_mean;
  m.coefficients.resize(m.standardized_coefficients.size());
  m.intercept = st.y_mean;
  for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
    m.coefficients[j] = m.standardized_coefficients[j] / m.scales[j];
    m.intercept -= m.coefficients[j] * m.means[j];
  }
  return m;
}

// Gram matrix Z'Z and Z'y over the standardised design.
void gram(const Standardized& st, Eigen::MatrixXd& G, Eigen::VectorXd& c) {
  const std::size_t n = st.z.rows();
  const std::size_t p = st.z.cols();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Z(
      st.z.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const Eigen::Map<const Eigen::VectorXd> yc(st.centred_y.data(), static_cast<Eigen::Index>(n));
  G = Z.transpose() * Z;
  c = Z.transpose() * yc;
}

LinearModel solve_l2(const Matrix& X, std::span<const double> y, double lambda,
                     const LinearOptions& opts, Penalty penalty) {
  auto st = standardize(X, y, opts.one_hot);
  const auto p = static_cast<Eigen::Index>(st.z.cols());
  Eigen::MatrixXd G;
  Eigen::VectorXd c;
  gram(st, G, c);
  G.diagonal().array() += lambda + kNormalEquationJitter;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (st.constant[static_cast<std::size_t>(j)]) {
      G.row(j).setZero();
      G.col(j).setZero();
      G(j, j) = 1.0;
      c(j) = 0.0;
    }
  }
  const Eigen::VectorXd beta = G.ldlt().solve(c);
  std::vector<double> b(beta.data(), beta.data() + beta.size());
  return finish(st, std::move(b), penalty, lambda, opts.one_hot, X.cols());
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

Matrix expand_features(const Matrix& X, const std::vector<OneHotSpec>& one_hot) {
  Matrix out(X.rows(), expanded_arity(X.cols(), one_hot));
  for (std::size_t r = 0; r < X.rows(); ++r) expand_into(X.row(r), one_hot, out.row(r));
  return out;
}

std::vector<double> LinearModel::expand(std::span<const double> x) const {
  if (x.size() != input_arity) {
    throw DataError("feature vector has " + std::to_string(x.size()) +
                    " values, linear model expects " + std::to_string(input_arity));
  }
  std::vector<double> out(means.size());
  expand_into(x, one_hot, out);
  return out;
}

double LinearModel::predict(std::span<const double> x) const {
  const auto e = expand(x);
  double f = target_mean;
  for (std::size_t j = 0; j < e.size(); ++j) {
    f += standardized_coefficients[j] * ((e[j] - means[j]) / scales[j]);
  }
  return f;
}

std::vector<double> LinearModel::predict(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

LinearModel fit_ols(const Matrix& X, std::span<const double> y, const LinearOptions& opts) {
  return solve_l2(X, y, 0.0, opts, Penalty::None);
}

LinearModel fit_ridge(const Matrix& X, std::span<const double> y, double lambda,
                      const LinearOptions& opts) {
  if (!(lambda >= 0.0)) throw ConfigError("ridge lambda must be >= 0");
  return solve_l2(X, y, lambda, opts, Penalty::Ridge);
}

double lasso_lambda_max(const Matrix& X, std::span<const double> y, const LinearOptions& opts) {
  auto st = standardize(X, y, opts.one_hot);
  Eigen::MatrixXd G;
  Eigen::VectorXd c;
  gram(st, G, c);
  return c.cwiseAbs().maxCoeff() / static_cast<double>(st.z.rows());
}

LinearModel fit_lasso(const Matrix& X, std::span<const double> y, double lambda,
                      const LinearOptions& opts, const LassoOptions& lasso) {
  if (!(lambda >= 0.0)) throw ConfigError("lasso lambda must be >= 0");
  if (!(lasso.tol > 0.0) || lasso.max_iter < 1) throw ConfigError("invalid lasso tolerance");
  auto st = standardize(X, y, opts.one_hot);
  const std::size_t p = st.z.cols();
  const auto dn = static_cast<double>(st.z.rows());
  Eigen::MatrixXd G;
  Eigen::VectorXd c;
  gram(st, G, c);
  G /= dn;
  c /= dn;

  // Covariance-update coordinate descent: grad_j = c_j - (G beta)_j.
  std::vector<double> beta(p, 0.0);
  const double threshold = lasso.tol * std::max(st.y_sd, 1e-300);
  bool converged = false;
  int iter = 0;
  while (iter < lasso.max_iter) {
    ++iter;
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (st.constant[j]) continue;
      double partial = c(static_cast<Eigen::Index>(j));
      for (std::size_t k = 0; k < p; ++k) {
        if (k != j) partial -= G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * beta[k];
      }
      const double updated =
          soft_threshold(partial, lambda) / G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
      max_change = std::max(max_change, std::abs(updated - beta[j]));
      beta[j] = updated;
    }
    if (max_change < threshold) {
      converged = true;
      break;
    }
  }
  auto model = finish(st, std::move(beta), Penalty::Lasso, lambda, opts.one_hot, X.cols());
  model.converged = converged;
  model.iterations = iter;
  return model;
}

}  // namespace tripboost

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tripboost/matrix.hpp"

namespace tripboost {

enum class Penalty { None, Ridge, Lasso };

const char* to_string(Penalty p);
Penalty parse_penalty(std::string_view text);

/// Replace an integer-coded column by indicator columns for levels
/// 1..levels-1 (level 0 is the reference and gets no column).
struct OneHotSpec {
  std::size_t column = 0;
  int levels = 2;

  bool operator==(const OneHotSpec&) const = default;
};

struct LinearOptions {
  std::vector<OneHotSpec> one_hot;
};

/// Linear model over the expanded feature space. Features are standardised
/// (zero mean, unit population variance) at fit time; constant expanded
/// features get scale 1 and coefficient 0.
struct LinearModel {
  Penalty penalty = Penalty::None;
  double lambda = 0.0;
  std::vector<OneHotSpec> one_hot;
  std::size_t input_arity = 0;

  std::vector<double> means;   // per expanded feature
  std::vector<double> scales;  // per expanded feature, > 0
  std::vector<double> standardized_coefficients;
  double target_mean = 0.0;    // intercept in standardised space

  /// Raw-space view: prediction = intercept + coefficients . expand(x).
  std::vector<double> coefficients;
  double intercept = 0.0;

  bool converged = true;  // lasso: false when max_iter was exhausted
  int iterations = 0;

  std::vector<double> expand(std::span<const double> x) const;
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;
};

/// Expanded design for `X` under the given one-hot specs.
Matrix expand_features(const Matrix& X, const std::vector<OneHotSpec>& one_hot);

/// Least squares via the normal equations on standardised features, with a
/// 1e-10 diagonal jitter for rank deficiency.
LinearModel fit_ols(const Matrix& X, std::span<const double> y, const LinearOptions& opts = {});

/// Minimises sum (y - Xb - c)^2 + lambda * |b|^2 on standardised features;
/// the intercept is unpenalised. Throws ConfigError for lambda < 0.
LinearModel fit_ridge(const Matrix& X, std::span<const double> y, double lambda,
                      const LinearOptions& opts = {});

struct LassoOptions {
  /// Convergence: max standardised coefficient change below tol * sd(y).
  double tol = 1e-8;
  int max_iter = 10000;
};

/// Minimises (1/2n) sum (y - Xb - c)^2 + lambda * |b|_1 on standardised
/// features by cyclic coordinate descent with soft-thresholding. A run that
/// exhausts max_iter returns with `converged == false`.
LinearModel fit_lasso(const Matrix& X, std::span<const double> y, double lambda,
                      const LinearOptions& opts = {}, const LassoOptions& lasso = {});

/// Smallest lambda for which the lasso solution is all zeros:
/// max_j |<z_j, y - mean(y)>| / n over standardised columns z_j.
double lasso_lambda_max(const Matrix& X, std::span<const double> y, const LinearOptions& opts = {});

inline constexpr double kNormalEquationJitter = 1e-10;

}  // namespace tripboost

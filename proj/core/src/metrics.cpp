#include "tripboost/metrics.hpp"

#include <cmath>

#include "tripboost/errors.hpp"

namespace tripboost {
namespace {

void check(std::span<const double> y, std::span<const double> p) {
  if (y.size() != p.size()) throw DataError("metric inputs differ in length");
  if (y.empty()) throw DataError("metric inputs are empty");
}

}  // namespace

double mae(std::span<const double> y, std::span<const double> predicted) {
  check(y, predicted);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - predicted[i]);
  return sum / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> predicted) {
  check(y, predicted);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - predicted[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(y.size()));
}

}  // namespace tripboost

#pragma once

#include <span>

namespace tripboost {

/// Mean absolute error. Throws DataError on empty or mismatched inputs.
double mae(std::span<const double> y, std::span<const double> predicted);

/// Root mean squared error. Throws DataError on empty or mismatched inputs.
double rmse(std::span<const double> y, std::span<const double> predicted);

}  // namespace tripboost

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tripboost/matrix.hpp"

namespace tripboost {

/// Binning of one feature. A value v falls in bin `k` = number of edges
/// strictly below v, so a value equal to an edge goes to the lower bin.
struct FeatureBins {
  std::vector<double> edges;    // strictly ascending
  std::vector<double> bin_min;  // smallest training value per bin
  std::vector<double> bin_max;  // largest training value per bin

  std::size_t num_bins() const { return edges.size() + 1; }
  std::size_t bin_of(double value) const;

  bool operator==(const FeatureBins&) const = default;
};

struct BinMap {
  std::vector<FeatureBins> features;
  int max_bins = 255;

  bool operator==(const BinMap&) const = default;
};

inline constexpr int kMaxBinsLimit = 255;

/// Per-feature edges. With at most `max_bins` distinct values the edges are
/// the midpoints between consecutive distinct values (histogram splits are
/// then exact); otherwise edges sit at equally spaced quantiles, moved to
/// the next gap between distinct values. `max_bins` must be in [2, 255].
BinMap build_bins(const Matrix& X, int max_bins);

/// Bin codes for every cell, stored column-major.
class BinnedMatrix {
 public:
  BinnedMatrix() = default;
  BinnedMatrix(const BinMap& bins, const Matrix& X);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::uint8_t* column(std::size_t c) const { return codes_.data() + c * rows_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> codes_;
};

/// Split threshold between two adjacent observed values a < b. Guaranteed
/// to satisfy a <= t < b even when the midpoint rounds up to b.
inline double split_midpoint(double a, double b) {
  const double mid = a + (b - a) * 0.5;
  return mid < b ? mid : a;
}

}  // namespace tripboost

#include "tripboost/bins.hpp"

#include <algorithm>

#include "tripboost/errors.hpp"

namespace tripboost {

std::size_t FeatureBins::bin_of(double value) const {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

namespace {

FeatureBins bins_for_column(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  for (const double v : values) {
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
  }

  FeatureBins fb;
  const auto limit = static_cast<std::size_t>(max_bins);
  if (distinct.size() <= limit) {
    for (std::size_t i = 1; i < distinct.size(); ++i) {
      fb.edges.push_back(split_midpoint(distinct[i - 1], distinct[i]));
    }
  } else {
    const std::size_t n = values.size();
    for (std::size_t k = 1; k < limit; ++k) {
      const std::size_t pos = k * n / limit;  // first sorted position of the upper bin
      if (pos == 0 || pos >= n) continue;
      const double lower = values[pos - 1];
      const auto next = std::upper_bound(distinct.begin(), distinct.end(), lower);
      if (next == distinct.end()) continue;
      const double edge = split_midpoint(lower, *next);
      if (fb.edges.empty() || edge > fb.edges.back()) fb.edges.push_back(edge);
    }
  }

  fb.bin_min.assign(fb.num_bins(), 0.0);
  fb.bin_max.assign(fb.num_bins(), 0.0);
  std::vector<bool> seen(fb.num_bins(), false);
  for (const double v : distinct) {
    const auto b = fb.bin_of(v);
    if (!seen[b]) {
      fb.bin_min[b] = v;
      seen[b] = true;
    }
    fb.bin_max[b] = v;
  }
  return fb;
}

}  // namespace

BinMap build_bins(const Matrix& X, int max_bins) {
  if (max_bins < 2 || max_bins > kMaxBinsLimit) {
    throw ConfigError("max_bins must lie in [2, 255]");
  }
  if (X.empty()) throw DataError("cannot build bins from an empty matrix");
  BinMap map;
  map.max_bins = max_bins;
  map.features.reserve(X.cols());
  for (std::size_t c = 0; c < X.cols(); ++c) {
    map.features.push_back(bins_for_column(X.column(c), max_bins));
  }
  return map;
}

BinnedMatrix::BinnedMatrix(const BinMap& bins, const Matrix& X)
    : rows_(X.rows()), cols_(X.cols()), codes_(X.rows() * X.cols()) {
  if (bins.features.size() != X.cols()) {
    throw DataError("bin map arity does not match the feature matrix");
  }
  for (std::size_t c = 0; c < cols_; ++c) {
    const auto& fb = bins.features[c];
    std::uint8_t* out = codes_.data() + c * rows_;
    for (std::size_t r = 0; r < rows_; ++r) out[r] = static_cast<std::uint8_t>(fb.bin_of(X(r, c)));
  }
}

}  // namespace tripboost

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tripboost/bins.hpp"
#include "tripboost/matrix.hpp"

namespace tripboost {

struct TreeConfig {
  static constexpr int kUnlimitedDepth = -1;

  int max_depth = kUnlimitedDepth;  // root is depth 0; -1 means no limit
  int min_samples_leaf = 1;
  int min_samples_split = 2;
  int max_bins = 255;             // histogram mode only
  double feature_subsample = 1.0; // fraction of features considered per node
  std::uint64_t seed = 0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  /// Candidate features per node: ceil(p * feature_subsample), at least 1.
  std::size_t features_per_node(std::size_t p) const;

  bool operator==(const TreeConfig&) const = default;
};

/// Flattened node. Internal nodes have `feature >= 0` and route
/// `x[feature] <= threshold` to `left`. Nodes are stored in depth-first
/// pre-order with the root at index 0.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;     // weighted mean of the training targets reaching the node
  std::size_t count = 0;  // training samples (with multiplicity) reaching the node

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes, std::size_t arity)
      : nodes_(std::move(nodes)), arity_(arity) {}

  /// Throws DataError when `x.size()` differs from the training arity.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t arity() const { return arity_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  bool operator==(const Tree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t arity_ = 0;
};

/// Column-major copy of a feature matrix; the layout the exact split
/// scanner reads.
class ColumnMatrix {
 public:
  ColumnMatrix() = default;
  explicit ColumnMatrix(const Matrix& X);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const double* column(std::size_t c) const { return data_.data() + c * rows_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Training rows of one fit as a multiset of row indices in ascending order.
/// Bootstrap resamples repeat indices.
using SampleIndices = std::vector<std::uint32_t>;

SampleIndices all_rows(std::size_t n);

/// Greedy depth-first CART with squared loss. At each node every midpoint
/// between consecutive distinct values of every candidate feature is
/// scored by weighted variance reduction; the best split wins, ties going
/// to the lowest feature index and then the lowest threshold. Growth stops
/// at the depth / sample limits or when no split reduces the variance.
/// `w` may be empty (unit weights); otherwise it must be positive.
Tree fit_tree_exact(const Matrix& X, std::span<const double> y, std::span<const double> w,
                    const TreeConfig& cfg);

/// Same contract as fit_tree_exact, but candidate thresholds are bin
/// boundaries and split statistics come from per-bin histograms. Where a
/// feature has at most max_bins distinct values the result is identical
/// to fit_tree_exact.
Tree fit_tree_hist(const Matrix& X, std::span<const double> y, std::span<const double> w,
                   const TreeConfig& cfg, const BinMap& bins);

/// Prepared-data entry points used by the ensembles. `samples` must be
/// sorted ascending and nonempty.
Tree fit_tree_exact(const ColumnMatrix& X, std::span<const double> y, std::span<const double> w,
                    const SampleIndices& samples, const TreeConfig& cfg);
Tree fit_tree_hist(const BinnedMatrix& X, const BinMap& bins, std::span<const double> y,
                   std::span<const double> w, const SampleIndices& samples,
                   const TreeConfig& cfg);

/// Mean squared error of `tree` over the rows of X.
double training_mse(const Tree& tree, const Matrix& X, std::span<const double> y);

}  // namespace tripboost

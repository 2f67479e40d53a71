#include "tripboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

#include "tripboost/errors.hpp"
#include "tripboost/rng.hpp"

namespace tripboost {

void TreeConfig::validate() const {
  if (max_depth != kUnlimitedDepth && max_depth < 1) {
    throw ConfigError("max_depth must be a positive integer or unlimited");
  }
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
  if (max_bins < 2 || max_bins > kMaxBinsLimit) throw ConfigError("max_bins must lie in [2, 255]");
  if (!(feature_subsample > 0.0 && feature_subsample <= 1.0)) {
    throw ConfigError("feature_subsample must lie in (0, 1]");
  }
}

std::size_t TreeConfig::features_per_node(std::size_t p) const {
  const double raw = static_cast<double>(p) * feature_subsample;
  const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(k, 1, p);
}

double Tree::predict(std::span<const double> x) const {
  if (x.size() != arity_) {
    throw DataError("feature vector has " + std::to_string(x.size()) + " values, tree expects " +
                    std::to_string(arity_));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                      : n.right);
  }
  return nodes_[i].value;
}

std::vector<double> Tree::predict(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

std::size_t Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return best;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

ColumnMatrix::ColumnMatrix(const Matrix& X) : rows_(X.rows()), cols_(X.cols()), data_(X.rows() * X.cols()) {
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) data_[c * rows_ + r] = X(r, c);
  }
}

SampleIndices all_rows(std::size_t n) {
  SampleIndices s(n);
  std::iota(s.begin(), s.end(), std::uint32_t{0});
  return s;
}

namespace {

// Gains below this fraction of the node's centred sum of squares are
// treated as zero, and gains closer than it are treated as ties.
constexpr double kRelativeGainTolerance = 1e-13;

struct Histogram {
  std::vector<std::uint32_t> count;
  std::vector<double> weight;
  std::vector<double> sum;  // weighted (y - centre)
};

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
  std::size_t left_bin = 0;  // histogram mode: last bin routed left
};

class Grower {
 public:
  // Exact mode.
  Grower(const ColumnMatrix& X, std::span<const double> y, std::span<const double> w,
         const TreeConfig& cfg)
      : exact_(&X), y_(y), w_(w), cfg_(cfg), arity_(X.cols()), rng_(cfg.seed) {}

  // Histogram mode.
  Grower(const BinnedMatrix& X, const BinMap& bins, std::span<const double> y,
         std::span<const double> w, const TreeConfig& cfg)
      : binned_(&X), bins_(&bins), y_(y), w_(w), cfg_(cfg), arity_(X.cols()), rng_(cfg.seed) {
    offsets_.resize(arity_ + 1, 0);
    for (std::size_t f = 0; f < arity_; ++f) {
      offsets_[f + 1] = offsets_[f] + bins.features[f].num_bins();
    }
  }

  Tree grow(SampleIndices samples) {
    double wsum = 0.0, wy = 0.0;
    for (const auto i : samples) {
      wsum += weight(i);
      wy += weight(i) * y_[i];
    }
    centre_ = wy / wsum;
    std::optional<Histogram> root_hist;
    if (binned_ && may_split(0, samples.size())) root_hist = build_hist(samples);
    build(std::move(samples), 0, root_hist ? &*root_hist : nullptr);
    return Tree(std::move(nodes_), arity_);
  }

 private:
  double weight(std::size_t i) const { return w_.empty() ? 1.0 : w_[i]; }

  bool may_split(int depth, std::size_t n) const {
    if (cfg_.max_depth != TreeConfig::kUnlimitedDepth && depth >= cfg_.max_depth) return false;
    if (n < static_cast<std::size_t>(cfg_.min_samples_split)) return false;
    if (n < 2 * static_cast<std::size_t>(cfg_.min_samples_leaf)) return false;
    return true;
  }

  int build(SampleIndices samples, int depth, Histogram* hist) {
    double W = 0.0, S = 0.0, Q = 0.0, WY = 0.0;
    bool pure = true;
    const double first_y = y_[samples.front()];
    for (const auto i : samples) {
      const double wi = weight(i);
      const double d = y_[i] - centre_;
      W += wi;
      S += wi * d;
      Q += wi * d * d;
      WY += wi * y_[i];
      pure = pure && y_[i] == first_y;
    }

    const int index = static_cast<int>(nodes_.size());
    TreeNode node;
    node.value = WY / W;
    node.count = samples.size();
    nodes_.push_back(node);

    if (pure || !may_split(depth, samples.size())) return index;

    std::vector<std::size_t> candidates;
    const std::size_t k = cfg_.features_per_node(arity_);
    if (k < arity_) {
      candidates = rng_.sample_without_replacement(arity_, k);
    } else {
      candidates.resize(arity_);
      std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    }

    const double tol = kRelativeGainTolerance * Q;
    BestSplit best;
    for (const auto f : candidates) {
      if (binned_) {
        scan_hist(f, *hist, W, S, tol, best);
      } else {
        scan_exact(f, samples, W, S, tol, best);
      }
    }
    if (best.feature < 0 || !(best.gain > tol)) return index;

    SampleIndices left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    const auto f = static_cast<std::size_t>(best.feature);
    if (binned_) {
      const std::uint8_t* codes = binned_->column(f);
      for (const auto i : samples) (codes[i] <= best.left_bin ? left : right).push_back(i);
    } else {
      const double* col = exact_->column(f);
      for (const auto i : samples) (col[i] <= best.threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    nodes_[static_cast<std::size_t>(index)].feature = best.feature;
    nodes_[static_cast<std::size_t>(index)].threshold = best.threshold;

    std::optional<Histogram> left_hist, right_hist;
    if (binned_) child_histograms(*hist, left, right, depth + 1, left_hist, right_hist);

    const int l = build(std::move(left), depth + 1, left_hist ? &*left_hist : nullptr);
    left_hist.reset();
    nodes_[static_cast<std::size_t>(index)].left = l;
    const int r = build(std::move(right), depth + 1, right_hist ? &*right_hist : nullptr);
    nodes_[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  void consider(BestSplit& best, double gain, double tol, std::size_t f, double threshold,
                std::size_t left_bin) const {
    if (gain > best.gain + tol) {
      best.gain = gain;
      best.feature = static_cast<int>(f);
      best.threshold = threshold;
      best.left_bin = left_bin;
    }
  }

  void scan_exact(std::size_t f, const SampleIndices& samples, double W, double S, double tol,
                  BestSplit& best) {
    const double* col = exact_->column(f);
    sorted_.clear();
    for (const auto i : samples) sorted_.emplace_back(col[i], i);
    std::sort(sorted_.begin(), sorted_.end());

    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    const std::size_t n = sorted_.size();
    const double parent = S * S / W;
    double wl = 0.0, sl = 0.0;
    std::size_t nl = 0;
    std::size_t pos = 0;
    while (pos < n) {
      const double value = sorted_[pos].first;
      double gw = 0.0, gs = 0.0;
      std::size_t end = pos;
      for (; end < n && sorted_[end].first == value; ++end) {
        const auto i = sorted_[end].second;
        gw += weight(i);
        gs += weight(i) * (y_[i] - centre_);
      }
      wl += gw;
      sl += gs;
      nl += end - pos;
      pos = end;
      if (pos == n) break;
      if (nl < min_leaf || n - nl < min_leaf) continue;
      const double wr = W - wl;
      const double sr = S - sl;
      const double gain = sl * sl / wl + sr * sr / wr - parent;
      consider(best, gain, tol, f, split_midpoint(value, sorted_[pos].first), 0);
    }
  }

  void scan_hist(std::size_t f, const Histogram& hist, double W, double S, double tol,
                 BestSplit& best) const {
    const auto& fb = bins_->features[f];
    const std::size_t base = offsets_[f];
    const std::size_t nbins = fb.num_bins();
    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);

    std::size_t total = 0;
    for (std::size_t b = 0; b < nbins; ++b) total += hist.count[base + b];

    const double parent = S * S / W;
    double wl = 0.0, sl = 0.0;
    std::size_t nl = 0;
    std::optional<std::size_t> last;  // last occupied bin on the left
    for (std::size_t b = 0; b < nbins; ++b) {
      const auto c = hist.count[base + b];
      if (c == 0) continue;
      if (last && nl >= min_leaf && total - nl >= min_leaf) {
        const double wr = W - wl;
        const double sr = S - sl;
        const double gain = sl * sl / wl + sr * sr / wr - parent;
        consider(best, gain, tol, f, split_midpoint(fb.bin_max[*last], fb.bin_min[b]), *last);
      }
      wl += hist.weight[base + b];
      sl += hist.sum[base + b];
      nl += c;
      last = b;
    }
  }

  Histogram build_hist(const SampleIndices& samples) const {
    Histogram h;
    const std::size_t total = offsets_.back();
    h.count.assign(total, 0);
    h.weight.assign(total, 0.0);
    h.sum.assign(total, 0.0);
    for (std::size_t f = 0; f < arity_; ++f) {
      const std::uint8_t* codes = binned_->column(f);
      const std::size_t base = offsets_[f];
      for (const auto i : samples) {
        const std::size_t slot = base + codes[i];
        const double wi = weight(i);
        h.count[slot] += 1;
        h.weight[slot] += wi;
        h.sum[slot] += wi * (y_[i] - centre_);
      }
    }
    return h;
  }

  // parent := parent - small. Returns false if rounding produced a
  // non-positive weight in an occupied bin; caller then recounts.
  static bool subtract_into(Histogram& parent, const Histogram& small) {
    for (std::size_t s = 0; s < parent.count.size(); ++s) {
      const auto c = parent.count[s] - small.count[s];
      parent.count[s] = c;
      if (c == 0) {
        parent.weight[s] = 0.0;
        parent.sum[s] = 0.0;
      } else {
        parent.weight[s] -= small.weight[s];
        parent.sum[s] -= small.sum[s];
        if (!(parent.weight[s] > 0.0)) return false;
      }
    }
    return true;
  }

  void child_histograms(Histogram& parent, const SampleIndices& left, const SampleIndices& right,
                        int child_depth, std::optional<Histogram>& left_hist,
                        std::optional<Histogram>& right_hist) const {
    const bool need_left = may_split(child_depth, left.size());
    const bool need_right = may_split(child_depth, right.size());
    if (!need_left && !need_right) return;
    const bool left_small = left.size() <= right.size();
    const SampleIndices& small = left_small ? left : right;
    const SampleIndices& large = left_small ? right : left;
    const bool need_small = left_small ? need_left : need_right;
    const bool need_large = left_small ? need_right : need_left;

    Histogram small_hist = build_hist(small);
    std::optional<Histogram> large_hist;
    if (need_large) {
      large_hist = std::move(parent);
      if (!subtract_into(*large_hist, small_hist)) large_hist = build_hist(large);
    }
    std::optional<Histogram> small_opt;
    if (need_small) small_opt = std::move(small_hist);
    if (left_small) {
      left_hist = std::move(small_opt);
      right_hist = std::move(large_hist);
    } else {
      left_hist = std::move(large_hist);
      right_hist = std::move(small_opt);
    }
  }

  const ColumnMatrix* exact_ = nullptr;
  const BinnedMatrix* binned_ = nullptr;
  const BinMap* bins_ = nullptr;
  std::span<const double> y_;
  std::span<const double> w_;
  TreeConfig cfg_;
  std::size_t arity_;
  Rng rng_;
  double centre_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::uint32_t>> sorted_;
};

void check_inputs(std::size_t rows, std::span<const double> y, std::span<const double> w,
                  const SampleIndices& samples, const TreeConfig& cfg) {
  cfg.validate();
  if (rows == 0 || samples.empty()) throw DataError("cannot fit a tree on empty data");
  if (y.size() != rows) throw DataError("target length does not match the feature rows");
  if (!w.empty()) {
    if (w.size() != rows) throw DataError("weight length does not match the feature rows");
    for (const double wi : w) {
      if (!(wi > 0.0) || !std::isfinite(wi)) throw DataError("sample weights must be positive");
    }
  }
  if (!std::is_sorted(samples.begin(), samples.end()) || samples.back() >= rows) {
    throw DataError("sample indices must be sorted and within range");
  }
}

}  // namespace

Tree fit_tree_exact(const ColumnMatrix& X, std::span<const double> y, std::span<const double> w,
                    const SampleIndices& samples, const TreeConfig& cfg) {
  check_inputs(X.rows(), y, w, samples, cfg);
  return Grower(X, y, w, cfg).grow(samples);
}

Tree fit_tree_hist(const BinnedMatrix& X, const BinMap& bins, std::span<const double> y,
                   std::span<const double> w, const SampleIndices& samples,
                   const TreeConfig& cfg) {
  check_inputs(X.rows(), y, w, samples, cfg);
  if (bins.features.size() != X.cols()) throw DataError("bin map arity mismatch");
  return Grower(X, bins, y, w, cfg).grow(samples);
}

Tree fit_tree_exact(const Matrix& X, std::span<const double> y, std::span<const double> w,
                    const TreeConfig& cfg) {
  if (X.empty()) throw DataError("cannot fit a tree on empty data");
  return fit_tree_exact(ColumnMatrix(X), y, w, all_rows(X.rows()), cfg);
}

Tree fit_tree_hist(const Matrix& X, std::span<const double> y, std::span<const double> w,
                   const TreeConfig& cfg, const BinMap& bins) {
  if (X.empty()) throw DataError("cannot fit a tree on empty data");
  return fit_tree_hist(BinnedMatrix(bins, X), bins, y, w, all_rows(X.rows()), cfg);
}

double training_mse(const Tree& tree, const Matrix& X, std::span<const double> y) {
  double ss = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const double d = y[r] - tree.predict(X.row(r));
    ss += d * d;
  }
  return ss / static_cast<double>(X.rows());
}

}  // namespace tripboost

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edcrowd/table.hpp"

// Histogram-based gradient-boosted decision trees for binary logloss:
// quantile binning, leaf-wise growth, gradient-based one-side sampling and
// gradient-ratio categorical splits.
namespace edcrowd::gbdt {

struct TrainConfig {
  int num_trees = 100;
  int num_leaves = 31;
  double learning_rate = 0.1;
  int max_bins = 255;
  int min_data_in_leaf = 20;
  double min_sum_hessian_in_leaf = 1e-3;
  double lambda_l2 = 1e-3;
  // GOSS: keep the top `goss_top_rate` rows by |gradient|, sample
  // `goss_other_rate` of all rows from the remainder. (1, 0) disables it.
  double goss_top_rate = 0.2;
  double goss_other_rate = 0.1;
  std::vector<std::size_t> categorical_features;
  // Multiplies gradients and hessians of positive rows. 1 = unweighted.
  double positive_weight = 1.0;
  std::uint64_t seed = 0;
  // Histogram construction threads; results are identical for any value.
  int num_threads = 1;

  void validate() const;
  bool goss_enabled() const { return goss_top_rate < 1.0; }
  bool is_categorical(std::size_t feature) const;
};

class BinMapper {
 public:
  BinMapper() = default;
  // `boundaries` are the finite upper edges of all bins but the last.
  static BinMapper numeric(std::vector<double> boundaries);
  static BinMapper categorical(std::vector<int> categories);

  bool is_categorical() const { return categorical_; }
  int num_bins() const;
  // Numeric: first bin whose upper edge is >= value. Categorical: code of
  // the category, or nullopt when unseen.
  std::optional<int> bin_of(double value) const;
  std::span<const double> boundaries() const { return boundaries_; }
  std::span<const int> categories() const { return categories_; }

  friend bool operator==(const BinMapper&, const BinMapper&) = default;

 private:
  bool categorical_ = false;
  std::vector<double> boundaries_;
  std::vector<int> categories_;
};

std::vector<BinMapper> build_bins(const MatrixView& features, const TrainConfig& cfg);

// Column-major bin codes for a training table.
class BinnedData {
 public:
  BinnedData(const MatrixView& features, std::vector<BinMapper> mappers);

  std::size_t rows() const { return rows_; }
  std::size_t features() const { return mappers_.size(); }
  const BinMapper& mapper(std::size_t f) const { return mappers_[f]; }
  const std::vector<BinMapper>& mappers() const { return mappers_; }
  std::span<const std::uint8_t> column(std::size_t f) const {
    return std::span<const std::uint8_t>(bins_).subspan(f * rows_, rows_);
  }

 private:
  std::size_t rows_ = 0;
  std::vector<BinMapper> mappers_;
  std::vector<std::uint8_t> bins_;
};

struct RowSample {
  std::vector<std::uint32_t> rows;  // ascending
  std::vector<double> weights;      // parallel to rows
};

// Top a*N rows by |gradient| (ties: lower row index first) with weight 1,
// plus b*N rows drawn uniformly from the rest with weight (1-a)/b.
RowSample goss_sample(std::span<const double> gradients, double top_rate, double other_rate,
                      std::uint64_t seed);

struct BinStats {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t n = 0;
};

// Per-feature gradient histograms of one leaf, concatenated.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(const std::vector<BinMapper>& mappers);

  std::size_t features() const { return offsets_.size() - 1; }
  std::span<BinStats> feature(std::size_t f) {
    return std::span<BinStats>(bins_).subspan(offsets_[f], offsets_[f + 1] - offsets_[f]);
  }
  std::span<const BinStats> feature(std::size_t f) const {
    return std::span<const BinStats>(bins_).subspan(offsets_[f], offsets_[f + 1] - offsets_[f]);
  }
  std::span<const BinStats> all() const { return bins_; }
  // this = parent - other, per bin.
  void subtract_from(const Histogram& parent, const Histogram& other);
  BinStats total() const;  // sums feature 0 (every feature sees every row)

 private:
  std::vector<std::size_t> offsets_;
  std::vector<BinStats> bins_;
};

struct SplitCandidate {
  std::size_t feature = 0;
  bool categorical = false;
  int threshold_bin = 0;              // numeric: left iff bin <= threshold_bin
  std::vector<int> left_bins;         // categorical: sorted bin codes going left
  double gain = 0.0;
  BinStats left;
  BinStats right;
};

// gain = GL^2/(HL+l) + GR^2/(HR+l) - GP^2/(HP+l), maximized over numeric
// thresholds and gradient-ratio-ordered categorical prefixes; nullopt when the
// leaf is too small or no split has positive gain.
std::optional<SplitCandidate> find_best_split(const Histogram& hist,
                                              const std::vector<BinMapper>& mappers,
                                              const TrainConfig& cfg);

double split_gain(const BinStats& left, const BinStats& right, double lambda);

struct TreeNode {
  bool is_leaf = true;
  // Internal nodes.
  std::size_t feature = 0;
  bool categorical = false;
  int threshold_bin = 0;
  double threshold = 0.0;             // numeric: left iff value <= threshold
  std::vector<int> left_categories;   // categorical: left iff value in set; unseen go right
  int left = -1;
  int right = -1;
  double gain = 0.0;
  // Leaves: log-odds contribution before learning-rate scaling.
  double value = 0.0;
  // All nodes: sum of (sample-weighted) hessians and row count.
  double cover = 0.0;
  std::uint32_t n_samples = 0;

  bool goes_left(double x) const;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t num_leaves() const;
  int leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return node(leaf_index(row)).value; }
  // Cover-weighted mean leaf value.
  double expected_value() const;

 private:
  std::vector<TreeNode> nodes_;
};

struct SplitRecord {
  const Histogram& parent;
  const Histogram& left;
  const Histogram& right;
  const SplitCandidate& split;
  std::span<const std::uint32_t> left_rows;
  std::span<const std::uint32_t> right_rows;
};
using SplitObserver = std::function<void(const SplitRecord&)>;

// Greedy leaf-wise growth: repeatedly split the open leaf with the largest
// gain until num_leaves or no positive split. Leaf value = -G/(H+lambda).
// `gradients` and `hessians` are indexed by row id; the sample's weights
// multiply them.
Tree grow_tree(const BinnedData& data, std::span<const double> gradients,
               std::span<const double> hessians, const RowSample& sample,
               const TrainConfig& cfg, const SplitObserver& observer = {});

class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::size_t num_features, double base_score, double learning_rate,
           std::vector<Tree> trees, std::vector<BinMapper> mappers, TrainConfig config);

  std::size_t num_features() const { return num_features_; }
  double base_score() const { return base_score_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<BinMapper>& mappers() const { return mappers_; }
  const TrainConfig& config() const { return config_; }

  // base_score + learning_rate * sum of tree outputs.
  double predict_raw(std::span<const double> row) const;
  double predict_proba(std::span<const double> row) const;
  std::vector<double> predict_proba(const MatrixView& rows) const;

  // Keeps the first n trees.
  Ensemble truncated(std::size_t n) const;

 private:
  void check_width(std::size_t width) const;

  std::size_t num_features_ = 0;
  double base_score_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<Tree> trees_;
  std::vector<BinMapper> mappers_;
  TrainConfig config_;
};

struct FitHooks {
  SplitObserver on_split;
  // Called after each boosting round with the training logloss.
  std::function<void(int iteration, double train_logloss)> on_iteration;
};

// Stops early when a round finds no positive-gain split.
// Errors: "degenerate labels" when only one class is present.
Ensemble fit(const MatrixView& features, std::span<const std::uint8_t> labels,
             const TrainConfig& cfg, const FitHooks& hooks = {});

double sigmoid(double x);
double logloss(std::span<const double> probabilities, std::span<const std::uint8_t> labels);

// Versioned JSON document; doubles round-trip exactly.
std::string to_json(const Ensemble& model);
Ensemble from_json(const std::string& text);
void save_model(const Ensemble& model, const std::string& path);
Ensemble load_model(const std::string& path);

}  // namespace edcrowd::gbdt

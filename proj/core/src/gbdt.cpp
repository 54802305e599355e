#include "edcrowd/gbdt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "edcrowd/error.hpp"
#include "parallel.hpp"

namespace edcrowd::gbdt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t rate_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
}

}  // namespace

void TrainConfig::validate() const {
  if (num_trees < 0) throw std::invalid_argument("num_trees must be >= 0");
  if (num_leaves < 2) throw std::invalid_argument("num_leaves must be >= 2");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (max_bins < 2 || max_bins > 256) throw std::invalid_argument("max_bins must be in [2, 256]");
  if (min_data_in_leaf < 1) throw std::invalid_argument("min_data_in_leaf must be >= 1");
  if (!(lambda_l2 > 0.0)) throw std::invalid_argument("lambda_l2 must be > 0");
  if (goss_top_rate < 0.0 || goss_other_rate < 0.0 || !(goss_top_rate + goss_other_rate > 0.0) ||
      goss_top_rate + goss_other_rate > 1.0 + 1e-12) {
    throw std::invalid_argument("GOSS rates must satisfy 0 < a + b <= 1");
  }
  if (goss_top_rate < 1.0 && goss_other_rate <= 0.0) {
    throw std::invalid_argument("GOSS with a < 1 needs b > 0");
  }
  if (!(positive_weight > 0.0)) throw std::invalid_argument("positive_weight must be > 0");
  if (num_threads < 1) throw std::invalid_argument("num_threads must be >= 1");
}

bool TrainConfig::is_categorical(std::size_t feature) const {
  return std::find(categorical_features.begin(), categorical_features.end(), feature) !=
         categorical_features.end();
}

RowSample goss_sample(std::span<const double> gradients, double top_rate, double other_rate,
                      std::uint64_t seed) {
  if (top_rate < 0.0 || other_rate < 0.0 || !(top_rate + other_rate > 0.0) ||
      top_rate + other_rate > 1.0 + 1e-12) {
    throw std::invalid_argument("GOSS rates must satisfy 0 < a + b <= 1");
  }
  const std::size_t n = gradients.size();
  RowSample out;
  if (top_rate >= 1.0) {
    out.rows.resize(n);
    std::iota(out.rows.begin(), out.rows.end(), 0u);
    out.weights.assign(n, 1.0);
    return out;
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::abs(gradients[a]) > std::abs(gradients[b]);
  });
  const std::size_t top_n = std::min(rate_count(top_rate, n), n);
  const std::size_t other_n = std::min(rate_count(other_rate, n), n - top_n);

  std::vector<std::pair<std::uint32_t, double>> picked;
  picked.reserve(top_n + other_n);
  for (std::size_t i = 0; i < top_n; ++i) picked.emplace_back(order[i], 1.0);

  // Partial Fisher-Yates over the small-gradient remainder.
  std::vector<std::uint32_t> rest(order.begin() + static_cast<std::ptrdiff_t>(top_n), order.end());
  std::mt19937_64 rng(seed);
  const double amplify = other_n > 0 ? (1.0 - top_rate) / other_rate : 0.0;
  for (std::size_t i = 0; i < other_n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, rest.size() - 1);
    std::swap(rest[i], rest[pick(rng)]);
    picked.emplace_back(rest[i], amplify);
  }
  std::sort(picked.begin(), picked.end());
  out.rows.reserve(picked.size());
  out.weights.reserve(picked.size());
  for (const auto& [row, w] : picked) {
    out.rows.push_back(row);
    out.weights.push_back(w);
  }
  return out;
}

Histogram::Histogram(const std::vector<BinMapper>& mappers) {
  offsets_.reserve(mappers.size() + 1);
  offsets_.push_back(0);
  for (const auto& m : mappers) {
    offsets_.push_back(offsets_.back() + static_cast<std::size_t>(m.num_bins()));
  }
  bins_.assign(offsets_.back(), BinStats{});
}

void Histogram::subtract_from(const Histogram& parent, const Histogram& other) {
  offsets_ = parent.offsets_;
  bins_.resize(parent.bins_.size());
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    bins_[i].g = parent.bins_[i].g - other.bins_[i].g;
    bins_[i].h = parent.bins_[i].h - other.bins_[i].h;
    bins_[i].n = parent.bins_[i].n - other.bins_[i].n;
  }
}

BinStats Histogram::total() const {
  BinStats t;
  if (offsets_.size() < 2) return t;
  for (const auto& b : feature(0)) {
    t.g += b.g;
    t.h += b.h;
    t.n += b.n;
  }
  return t;
}

double split_gain(const BinStats& left, const BinStats& right, double lambda) {
  const double gp = left.g + right.g;
  const double hp = left.h + right.h;
  return left.g * left.g / (left.h + lambda) + right.g * right.g / (right.h + lambda) -
         gp * gp / (hp + lambda);
}

namespace {

bool admissible(const BinStats& left, const BinStats& right, const TrainConfig& cfg) {
  const auto min_n = static_cast<std::uint32_t>(cfg.min_data_in_leaf);
  return left.n >= min_n && right.n >= min_n && left.h >= cfg.min_sum_hessian_in_leaf &&
         right.h >= cfg.min_sum_hessian_in_leaf;
}

BinStats minus(const BinStats& a, const BinStats& b) { return {a.g - b.g, a.h - b.h, a.n - b.n}; }

void consider(std::optional<SplitCandidate>& best, SplitCandidate&& c) {
  if (!(c.gain > 0.0)) return;
  if (!best || c.gain > best->gain) best = std::move(c);
}

}  // namespace

std::optional<SplitCandidate> find_best_split(const Histogram& hist,
                                              const std::vector<BinMapper>& mappers,
                                              const TrainConfig& cfg) {
  const BinStats parent = hist.total();
  if (parent.n < 2u * static_cast<std::uint32_t>(cfg.min_data_in_leaf)) return std::nullopt;
  const double lambda = cfg.lambda_l2;
  std::optional<SplitCandidate> best;

  for (std::size_t f = 0; f < hist.features(); ++f) {
    const auto bins = hist.feature(f);
    if (bins.size() < 2) continue;
    if (!mappers[f].is_categorical()) {
      // Empty bins leave the partition unchanged, and the lowest threshold of
      // a tied run wins, so only occupied bins are scanned.
      const auto min_n = static_cast<std::uint32_t>(cfg.min_data_in_leaf);
      BinStats left;
      double best_gain = 0.0;
      std::size_t best_t = bins.size();
      BinStats best_left;
      for (std::size_t t = 0; t + 1 < bins.size(); ++t) {
        if (bins[t].n == 0) continue;
        left.g += bins[t].g;
        left.h += bins[t].h;
        left.n += bins[t].n;
        if (left.n < min_n) continue;
        if (parent.n - left.n < min_n) break;
        const BinStats right = minus(parent, left);
        if (!admissible(left, right, cfg)) continue;
        const double gain = split_gain(left, right, lambda);
        if (gain > best_gain) {
          best_gain = gain;
          best_t = t;
          best_left = left;
        }
      }
      if (best_t < bins.size() && (!best || best_gain > best->gain)) {
        SplitCandidate c;
        c.feature = f;
        c.threshold_bin = static_cast<int>(best_t);
        c.gain = best_gain;
        c.left = best_left;
        c.right = minus(parent, best_left);
        best = std::move(c);
      }
      continue;
    }
    // Categorical: order non-empty bins by G/(H+lambda), scan prefixes.
    std::vector<int> used;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (bins[b].n > 0) used.push_back(static_cast<int>(b));
    }
    std::stable_sort(used.begin(), used.end(), [&](int a, int b) {
      const auto& x = bins[static_cast<std::size_t>(a)];
      const auto& y = bins[static_cast<std::size_t>(b)];
      return x.g / (x.h + lambda) < y.g / (y.h + lambda);
    });
    BinStats left;
    for (std::size_t k = 0; k + 1 < used.size(); ++k) {
      const auto& b = bins[static_cast<std::size_t>(used[k])];
      left.g += b.g;
      left.h += b.h;
      left.n += b.n;
      const BinStats right = minus(parent, left);
      if (!admissible(left, right, cfg)) continue;
      SplitCandidate c;
      c.feature = f;
      c.categorical = true;
      c.left_bins.assign(used.begin(), used.begin() + static_cast<std::ptrdiff_t>(k + 1));
      std::sort(c.left_bins.begin(), c.left_bins.end());
      c.gain = split_gain(left, right, lambda);
      c.left = left;
      c.right = right;
      consider(best, std::move(c));
    }
  }
  return best;
}

bool TreeNode::goes_left(double x) const {
  if (!categorical) return x <= threshold;
  const auto code = static_cast<int>(x);
  if (static_cast<double>(code) != x) return false;
  return std::binary_search(left_categories.begin(), left_categories.end(), code);
}

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

int Tree::leaf_index(std::span<const double> row) const {
  int i = 0;
  while (!node(i).is_leaf) {
    const auto& n = node(i);
    i = n.goes_left(row[n.feature]) ? n.left : n.right;
  }
  return i;
}

double Tree::expected_value() const {
  if (nodes_.empty()) return 0.0;
  double total = 0.0;
  for (const auto& n : nodes_) {
    if (n.is_leaf) total += n.value * n.cover;
  }
  return total / nodes_.front().cover;
}

namespace {

struct OpenLeaf {
  int node;
  std::size_t begin;
  std::size_t end;
  Histogram hist;
  std::optional<SplitCandidate> best;
};

void build_histogram(const BinnedData& data, std::span<const std::uint32_t> rows,
                     std::span<const double> wg, std::span<const double> wh, int threads,
                     Histogram& out) {
  // Gather ordered gradients once; every feature reuses them.
  std::vector<double> g(rows.size());
  std::vector<double> h(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    g[i] = wg[rows[i]];
    h[i] = wh[rows[i]];
  }
  detail::parallel_for(data.features(), threads, [&](std::size_t f) {
    auto bins = out.feature(f);
    std::fill(bins.begin(), bins.end(), BinStats{});
    if (bins.size() < 2) {
      // Single-bin features still carry the leaf totals.
      for (std::size_t i = 0; i < rows.size(); ++i) {
        bins[0].g += g[i];
        bins[0].h += h[i];
      }
      bins[0].n = static_cast<std::uint32_t>(rows.size());
      return;
    }
    const auto col = data.column(f);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto& b = bins[col[rows[i]]];
      b.g += g[i];
      b.h += h[i];
      ++b.n;
    }
  });
}

void fill_node_stats(TreeNode& node, std::span<const std::uint32_t> rows,
                     std::span<const double> wg, std::span<const double> wh, double lambda) {
  double g = 0.0;
  double h = 0.0;
  for (auto r : rows) {
    g += wg[r];
    h += wh[r];
  }
  node.cover = h;
  node.n_samples = static_cast<std::uint32_t>(rows.size());
  node.value = -g / (h + lambda);
}

// Reuses histogram buffers across leaves and trees; each is fully rewritten
// before use.
class HistogramPool {
 public:
  explicit HistogramPool(const std::vector<BinMapper>& mappers) : mappers_(mappers) {
    std::size_t total = 0;
    for (const auto& m : mappers) total += static_cast<std::size_t>(m.num_bins());
    auto& cache = cache_();
    if (!cache.empty() &&
        (cache.back().features() != mappers.size() || cache.back().all().size() != total)) {
      cache.clear();
    }
  }
  Histogram take() {
    auto& cache = cache_();
    if (cache.empty()) return Histogram(mappers_);
    Histogram h = std::move(cache.back());
    cache.pop_back();
    return h;
  }
  void give(Histogram&& h) {
    if (h.all().empty()) return;
    cache_().push_back(std::move(h));
    h = Histogram();
  }

 private:
  static std::vector<Histogram>& cache_() {
    thread_local std::vector<Histogram> cache;
    return cache;
  }
  const std::vector<BinMapper>& mappers_;
};

}  // namespace

Tree grow_tree(const BinnedData& data, std::span<const double> gradients,
               std::span<const double> hessians, const RowSample& sample, const TrainConfig& cfg,
               const SplitObserver& observer) {
  if (gradients.size() != data.rows() || hessians.size() != data.rows()) {
    throw std::invalid_argument("gradient/hessian length must equal row count");
  }
  if (sample.rows.size() != sample.weights.size()) {
    throw std::invalid_argument("sample rows and weights differ in length");
  }
  std::vector<double> wg(data.rows(), 0.0);
  std::vector<double> wh(data.rows(), 0.0);
  for (std::size_t i = 0; i < sample.rows.size(); ++i) {
    const auto r = sample.rows[i];
    wg[r] = gradients[r] * sample.weights[i];
    wh[r] = hessians[r] * sample.weights[i];
  }
  std::vector<std::uint32_t> order = sample.rows;
  std::vector<TreeNode> nodes(1);
  fill_node_stats(nodes[0], order, wg, wh, cfg.lambda_l2);
  if (order.empty()) {
    nodes[0].cover = 0.0;
    return Tree(std::move(nodes));
  }

  HistogramPool pool(data.mappers());
  std::vector<OpenLeaf> open;
  {
    OpenLeaf root{0, 0, order.size(), pool.take(), std::nullopt};
    build_histogram(data, order, wg, wh, cfg.num_threads, root.hist);
    root.best = find_best_split(root.hist, data.mappers(), cfg);
    open.push_back(std::move(root));
  }
  std::size_t leaves = 1;
  std::vector<std::uint32_t> scratch;

  while (leaves < static_cast<std::size_t>(cfg.num_leaves)) {
    std::size_t pick = open.size();
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (open[i].best && (pick == open.size() || open[i].best->gain > open[pick].best->gain)) {
        pick = i;
      }
    }
    if (pick == open.size()) break;
    OpenLeaf parent = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    const SplitCandidate& split = *parent.best;
    const BinMapper& mapper = data.mapper(split.feature);
    const auto col = data.column(split.feature);

    std::array<bool, 256> left_bin{};
    if (split.categorical) {
      for (int b : split.left_bins) left_bin[static_cast<std::size_t>(b)] = true;
    } else {
      for (int b = 0; b <= split.threshold_bin; ++b) left_bin[static_cast<std::size_t>(b)] = true;
    }
    // Stable partition of the parent's segment.
    scratch.clear();
    std::size_t write = parent.begin;
    for (std::size_t i = parent.begin; i < parent.end; ++i) {
      const auto r = order[i];
      if (left_bin[col[r]]) {
        order[write++] = r;
      } else {
        scratch.push_back(r);
      }
    }
    std::copy(scratch.begin(), scratch.end(), order.begin() + static_cast<std::ptrdiff_t>(write));
    const std::size_t mid = write;

    const int left_id = static_cast<int>(nodes.size());
    const int right_id = left_id + 1;
    nodes.emplace_back();
    nodes.emplace_back();
    {
      TreeNode& p = nodes[static_cast<std::size_t>(parent.node)];
      p.is_leaf = false;
      p.feature = split.feature;
      p.categorical = split.categorical;
      p.threshold_bin = split.threshold_bin;
      if (split.categorical) {
        for (int b : split.left_bins) {
          p.left_categories.push_back(mapper.categories()[static_cast<std::size_t>(b)]);
        }
        std::sort(p.left_categories.begin(), p.left_categories.end());
      } else {
        p.threshold = mapper.boundaries()[static_cast<std::size_t>(split.threshold_bin)];
      }
      p.left = left_id;
      p.right = right_id;
      p.gain = split.gain;
      p.value = 0.0;
    }
    const std::span<const std::uint32_t> all(order);
    const auto left_rows = all.subspan(parent.begin, mid - parent.begin);
    const auto right_rows = all.subspan(mid, parent.end - mid);
    fill_node_stats(nodes[static_cast<std::size_t>(left_id)], left_rows, wg, wh, cfg.lambda_l2);
    fill_node_stats(nodes[static_cast<std::size_t>(right_id)], right_rows, wg, wh, cfg.lambda_l2);

    // Direct histogram for the smaller child, subtraction for the larger.
    const bool left_small = left_rows.size() <= right_rows.size();
    OpenLeaf small{left_small ? left_id : right_id, left_small ? parent.begin : mid,
                   left_small ? mid : parent.end, pool.take(), std::nullopt};
    build_histogram(data, left_small ? left_rows : right_rows, wg, wh, cfg.num_threads,
                    small.hist);
    OpenLeaf large{left_small ? right_id : left_id, left_small ? mid : parent.begin,
                   left_small ? parent.end : mid, pool.take(), std::nullopt};
    large.hist.subtract_from(parent.hist, small.hist);

    if (observer) {
      const Histogram& lh = left_small ? small.hist : large.hist;
      const Histogram& rh = left_small ? large.hist : small.hist;
      observer(SplitRecord{parent.hist, lh, rh, split, left_rows, right_rows});
    }
    small.best = find_best_split(small.hist, data.mappers(), cfg);
    large.best = find_best_split(large.hist, data.mappers(), cfg);
    pool.give(std::move(parent.hist));
    // Leaves that cannot split never need their histogram again.
    for (OpenLeaf* leaf : {&small, &large}) {
      if (!leaf->best) pool.give(std::move(leaf->hist));
      open.push_back(std::move(*leaf));
    }
    ++leaves;
  }
  for (auto& leaf : open) pool.give(std::move(leaf.hist));
  return Tree(std::move(nodes));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logloss(std::span<const double> probabilities, std::span<const std::uint8_t> labels) {
  if (probabilities.size() != labels.size() || labels.empty()) {
    throw std::invalid_argument("logloss needs equal-length, non-empty inputs");
  }
  constexpr double eps = 1e-15;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], eps, 1.0 - eps);
    total -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(labels.size());
}

Ensemble::Ensemble(std::size_t num_features, double base_score, double learning_rate,
                   std::vector<Tree> trees, std::vector<BinMapper> mappers, TrainConfig config)
    : num_features_(num_features),
      base_score_(base_score),
      learning_rate_(learning_rate),
      trees_(std::move(trees)),
      mappers_(std::move(mappers)),
      config_(std::move(config)) {}

void Ensemble::check_width(std::size_t width) const {
  if (width != num_features_) {
    throw DataError("row width " + std::to_string(width) + " does not match model width " +
                    std::to_string(num_features_));
  }
}

double Ensemble::predict_raw(std::span<const double> row) const {
  check_width(row.size());
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(row);
  return base_score_ + learning_rate_ * sum;
}

double Ensemble::predict_proba(std::span<const double> row) const {
  return sigmoid(predict_raw(row));
}

std::vector<double> Ensemble::predict_proba(const MatrixView& rows) const {
  check_width(rows.cols());
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict_proba(rows.row(i));
  return out;
}

Ensemble Ensemble::truncated(std::size_t n) const {
  Ensemble copy = *this;
  if (n < copy.trees_.size()) copy.trees_.resize(n);
  return copy;
}

Ensemble fit(const MatrixView& features, std::span<const std::uint8_t> labels,
             const TrainConfig& cfg, const FitHooks& hooks) {
  cfg.validate();
  const std::size_t n = features.rows();
  if (labels.size() != n) throw DataError("label count does not match row count");
  if (n == 0) throw DataError("empty training table");
  for (auto c : cfg.categorical_features) {
    if (c >= features.cols()) throw std::invalid_argument("categorical feature id out of range");
  }
  std::size_t positives = 0;
  for (auto y : labels) {
    if (y > 1) throw DataError("labels must be 0 or 1");
    positives += y;
  }
  if (positives == 0 || positives == n) throw DataError("degenerate labels");

  const double wpos = cfg.positive_weight;
  const double pos_mass = wpos * static_cast<double>(positives);
  const double prevalence = pos_mass / (pos_mass + static_cast<double>(n - positives));
  const double base = std::log(prevalence / (1.0 - prevalence));

  auto mappers = build_bins(features, cfg);
  const BinnedData data(features, mappers);

  std::vector<double> raw(n, base);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<double> prob(n);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(cfg.num_trees));

  for (int it = 0; it < cfg.num_trees; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      const double w = labels[i] ? wpos : 1.0;
      grad[i] = w * (p - static_cast<double>(labels[i]));
      hess[i] = w * std::max(p * (1.0 - p), 1e-16);
    }
    RowSample sample =
        goss_sample(grad, cfg.goss_top_rate, cfg.goss_other_rate,
                    splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(it))));
    if (sample.rows.empty()) sample = goss_sample(grad, 1.0, 0.0, 0);
    Tree tree = grow_tree(data, grad, hess, sample, cfg, hooks.on_split);
    // A root-only tree would just shift the intercept by sampling noise;
    // boosting stops once no split has positive gain.
    if (tree.num_leaves() < 2) break;
    for (std::size_t i = 0; i < n; ++i) raw[i] += cfg.learning_rate * tree.predict(features.row(i));
    trees.push_back(std::move(tree));
    if (hooks.on_iteration) {
      for (std::size_t i = 0; i < n; ++i) prob[i] = sigmoid(raw[i]);
      hooks.on_iteration(it, logloss(prob, labels));
    }
  }
  return Ensemble(features.cols(), base, cfg.learning_rate, std::move(trees), std::move(mappers),
                  cfg);
}

}  // namespace edcrowd::gbdt

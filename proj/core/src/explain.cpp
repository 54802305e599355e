#include "edcrowd/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edcrowd/error.hpp"
#include "parallel.hpp"

namespace edcrowd::explain {

std::vector<double> shapley_exact(std::size_t n, const ValueFunction& v) {
  if (n > kMaxExactFeatures) throw std::invalid_argument("use tree_shap");
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) factorial[k] = factorial[k - 1] * static_cast<double>(k);

  const std::uint32_t full = n == 0 ? 0u : (1u << n);
  std::vector<double> value(full == 0 ? 1 : full);
  for (std::uint32_t mask = 0; mask < value.size(); ++mask) value[mask] = v(mask);

  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t s = 0; s < full; ++s) {
      if (s & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(s));
      const double weight = factorial[size] * factorial[n - size - 1] / factorial[n];
      phi[i] += weight * (value[s | bit] - value[s]);
    }
  }
  return phi;
}

namespace {

double expectation_at(const gbdt::Tree& tree, int node, std::span<const double> row,
                      const std::vector<bool>& known) {
  const auto& n = tree.node(node);
  if (n.is_leaf) return n.value;
  if (known[n.feature]) {
    return expectation_at(tree, n.goes_left(row[n.feature]) ? n.left : n.right, row, known);
  }
  const auto& l = tree.node(n.left);
  const auto& r = tree.node(n.right);
  return (l.cover * expectation_at(tree, n.left, row, known) +
          r.cover * expectation_at(tree, n.right, row, known)) /
         n.cover;
}

struct PathElement {
  long feature;
  double zero_fraction;
  double one_fraction;
  double weight;
};
using Path = std::vector<PathElement>;

void extend(Path& path, double zero_fraction, double one_fraction, long feature) {
  const std::size_t depth = path.size();
  path.push_back({feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0});
  for (std::size_t k = depth; k-- > 0;) {
    path[k + 1].weight += one_fraction * path[k].weight * static_cast<double>(k + 1) /
                          static_cast<double>(depth + 1);
    path[k].weight = zero_fraction * path[k].weight * static_cast<double>(depth - k) /
                     static_cast<double>(depth + 1);
  }
}

void unwind(Path& path, std::size_t index) {
  const std::size_t depth = path.size() - 1;
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next_one = path[depth].weight;
  for (std::size_t k = depth; k-- > 0;) {
    if (one != 0.0) {
      const double tmp = path[k].weight;
      path[k].weight = next_one * static_cast<double>(depth + 1) / (static_cast<double>(k + 1) * one);
      next_one = tmp - path[k].weight * zero * static_cast<double>(depth - k) /
                           static_cast<double>(depth + 1);
    } else {
      path[k].weight = path[k].weight * static_cast<double>(depth + 1) /
                       (zero * static_cast<double>(depth - k));
    }
  }
  for (std::size_t k = index; k < depth; ++k) {
    path[k].feature = path[k + 1].feature;
    path[k].zero_fraction = path[k + 1].zero_fraction;
    path[k].one_fraction = path[k + 1].one_fraction;
  }
  path.pop_back();
}

double unwound_sum(const Path& path, std::size_t index) {
  const std::size_t depth = path.size() - 1;
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next_one = path[depth].weight;
  double total = 0.0;
  if (one != 0.0) {
    for (std::size_t k = depth; k-- > 0;) {
      const double tmp = next_one / (static_cast<double>(k + 1) * one);
      total += tmp;
      next_one = path[k].weight - tmp * zero * static_cast<double>(depth - k);
    }
  } else if (zero != 0.0) {
    for (std::size_t k = depth; k-- > 0;) {
      total += path[k].weight / (zero * static_cast<double>(depth - k));
    }
  }
  return total * static_cast<double>(depth + 1);
}

void recurse(const gbdt::Tree& tree, int node_id, std::span<const double> row, Path path,
             double zero_fraction, double one_fraction, long feature, double scale,
             std::vector<double>& phi) {
  extend(path, zero_fraction, one_fraction, feature);
  const auto& node = tree.node(node_id);
  if (node.is_leaf) {
    for (std::size_t i = 1; i < path.size(); ++i) {
      const auto& el = path[i];
      phi[static_cast<std::size_t>(el.feature)] +=
          unwound_sum(path, i) * (el.one_fraction - el.zero_fraction) * node.value * scale;
    }
    return;
  }
  const bool left = node.goes_left(row[node.feature]);
  const int hot = left ? node.left : node.right;
  const int cold = left ? node.right : node.left;
  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  const auto split_feature = static_cast<long>(node.feature);
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path[k].feature == split_feature) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      unwind(path, k);
      break;
    }
  }
  recurse(tree, hot, row, path, tree.node(hot).cover / node.cover * incoming_zero, incoming_one,
          split_feature, scale, phi);
  recurse(tree, cold, row, path, tree.node(cold).cover / node.cover * incoming_zero, 0.0,
          split_feature, scale, phi);
}

}  // namespace

double conditional_expectation(const gbdt::Tree& tree, std::span<const double> row,
                               const std::vector<bool>& known) {
  if (tree.nodes().empty()) return 0.0;
  return expectation_at(tree, 0, row, known);
}

double conditional_expectation(const gbdt::Ensemble& model, std::span<const double> row,
                               const std::vector<bool>& known) {
  if (row.size() != model.num_features() || known.size() != model.num_features()) {
    throw DataError("row width does not match model");
  }
  double sum = 0.0;
  for (const auto& t : model.trees()) sum += conditional_expectation(t, row, known);
  return model.base_score() + model.learning_rate() * sum;
}

double Attribution::local_accuracy_error() const {
  return std::abs(base + std::accumulate(phi.begin(), phi.end(), 0.0) - raw);
}

Attribution tree_shap(const gbdt::Ensemble& model, std::span<const double> row) {
  if (row.size() != model.num_features()) throw DataError("row width does not match model");
  Attribution out;
  out.phi.assign(model.num_features(), 0.0);
  out.base = model.base_score();
  double expected = 0.0;
  for (const auto& tree : model.trees()) {
    if (tree.nodes().empty()) continue;
    expected += tree.expected_value();
    recurse(tree, 0, row, Path{}, 1.0, 1.0, -1, model.learning_rate(), out.phi);
  }
  out.base += model.learning_rate() * expected;
  out.raw = model.predict_raw(row);
  return out;
}

std::vector<Attribution> tree_shap(const gbdt::Ensemble& model, const MatrixView& rows,
                                   int threads) {
  if (rows.cols() != model.num_features()) throw DataError("row width does not match model");
  std::vector<Attribution> out(rows.rows());
  detail::parallel_for(rows.rows(), threads, [&](std::size_t i) { out[i] = tree_shap(model, rows.row(i)); });
  return out;
}

GroupImportance::GroupImportance(std::vector<FeatureGroupSpan> groups)
    : groups_(std::move(groups)), sums_(groups_.size(), 0.0) {}

void GroupImportance::add(const Attribution& a) {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& r = groups_[g].range;
    if (r.end() > a.phi.size()) throw DataError("attribution narrower than feature groups");
    double s = 0.0;
    for (std::size_t i = r.first; i < r.end(); ++i) s += std::abs(a.phi[i]);
    sums_[g] += s;
  }
  ++rows_;
}

std::vector<GroupScore> GroupImportance::ranked() const {
  std::vector<GroupScore> out;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    out.push_back({groups_[g].name, rows_ == 0 ? 0.0 : sums_[g] / static_cast<double>(rows_), 0});
  }
  std::stable_sort(out.begin(), out.end(), [](const GroupScore& a, const GroupScore& b) {
    return a.mean_abs_shap > b.mean_abs_shap;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::vector<GroupScore> group_importance(std::span<const Attribution> attributions,
                                         const FeatureLayout& layout) {
  if (attributions.empty()) throw DataError("no attributions");
  GroupImportance acc(layout.model_groups());
  for (const auto& a : attributions) acc.add(a);
  return acc.ranked();
}

}  // namespace edcrowd::explain

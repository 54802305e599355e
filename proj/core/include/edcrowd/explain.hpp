#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "edcrowd/features.hpp"
#include "edcrowd/gbdt.hpp"

// Shapley attribution in log-odds space. The value of a feature subset S is
// the path-dependent conditional expectation of the raw model output: descend
// each tree, follow the row's branch at splits on features in S, and average
// both children by training cover at splits on features outside S.
namespace edcrowd::explain {

inline constexpr std::size_t kMaxExactFeatures = 12;

// v(mask): bit i of mask set <=> feature i in the coalition.
using ValueFunction = std::function<double(std::uint32_t mask)>;

// phi_i = sum over S not containing i of |S|!(n-|S|-1)!/n! [v(S u {i}) - v(S)].
// Throws std::invalid_argument("use tree_shap") for n > 12.
std::vector<double> shapley_exact(std::size_t n, const ValueFunction& v);

// Cover-weighted conditional expectation of the raw output, with `known[f]`
// marking the features fixed to the row's values.
double conditional_expectation(const gbdt::Ensemble& model, std::span<const double> row,
                               const std::vector<bool>& known);
double conditional_expectation(const gbdt::Tree& tree, std::span<const double> row,
                               const std::vector<bool>& known);

struct Attribution {
  std::vector<double> phi;  // per model feature, log-odds
  double base = 0.0;        // E[f] = value of the empty coalition
  double raw = 0.0;         // model raw output for the row

  double local_accuracy_error() const;
};

// Polynomial-time exact Shapley values for the value function above.
Attribution tree_shap(const gbdt::Ensemble& model, std::span<const double> row);
// One attribution per row, in row order, for any thread count.
std::vector<Attribution> tree_shap(const gbdt::Ensemble& model, const MatrixView& rows,
                                   int threads = 1);

struct GroupScore {
  std::string group;
  double mean_abs_shap = 0.0;
  std::size_t rank = 0;  // 1 = most important
};

// Mean over rows of the per-group sum of |phi|; ranked descending, ties in
// group order.
class GroupImportance {
 public:
  explicit GroupImportance(std::vector<FeatureGroupSpan> groups);

  void add(const Attribution& a);
  std::size_t rows() const { return rows_; }
  std::vector<GroupScore> ranked() const;

 private:
  std::vector<FeatureGroupSpan> groups_;
  std::vector<double> sums_;
  std::size_t rows_ = 0;
};

std::vector<GroupScore> group_importance(std::span<const Attribution> attributions,
                                         const FeatureLayout& layout);

}  // namespace edcrowd::explain

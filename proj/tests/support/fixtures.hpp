#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "edcrowd/backtest.hpp"
#include "edcrowd/gbdt.hpp"
#include "edcrowd/synthgen.hpp"

namespace edcrowd::testing {

inline Date ymd(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline SectionSeries series_from(Hour start, std::size_t hours,
                                 const std::function<double(Section, Hour)>& value) {
  auto make = [&](Section s) {
    std::vector<double> v(hours);
    for (std::size_t i = 0; i < hours; ++i) v[i] = value(s, start + std::chrono::hours{static_cast<long>(i)});
    return HourlySeries(s, start, std::move(v));
  };
  return {make(Section::Bedoccupying), make(Section::Medical), make(Section::Surgical),
          make(Section::Critical)};
}

inline WeatherTable flat_weather(Date first, Date last) {
  WeatherTable t;
  for (Date d = first; d <= last; d += std::chrono::days{1}) t.emplace(d, WeatherDay{d, 0.0, 0.0, 2.0, -2.0, 0.0});
  return t;
}

// Generator output wrapped as a dataset under `layout`.
inline Dataset synthetic_dataset(int n_days, std::uint64_t seed, const FeatureLayout& layout,
                                 Date start = ymd(2018, 1, 1)) {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_days = n_days;
  cfg.seed = seed;
  cfg.start = start;
  const SynthData data = generate(cfg);
  return Dataset::from_series(data.series, data.weather_table(), data.holidays, {}, layout);
}

struct Table {
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;

  std::size_t rows() const { return labels.size(); }
  MatrixView view() const { return MatrixView(values, rows(), cols); }
};

// Label is 1 exactly when feature 0 exceeds 0.5; other columns are noise.
inline Table separable_table(std::size_t n, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Table t{cols, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols; ++c) t.values.push_back(u(rng));
    t.labels.push_back(t.values[i * cols] > 0.5 ? 1 : 0);
  }
  return t;
}

// Random tree over `features` numeric features, splits down to `depth`, with
// consistent covers (internal cover = sum of child covers).
inline gbdt::Tree random_tree(std::mt19937_64& rng, std::size_t features, int depth) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, features - 1);
  std::vector<gbdt::TreeNode> nodes(1);
  std::function<void(int, int)> grow = [&](int id, int level) {
    const bool split = level < depth && (level == 0 || u(rng) < 0.75);
    if (!split) {
      nodes[static_cast<std::size_t>(id)].is_leaf = true;
      nodes[static_cast<std::size_t>(id)].value = u(rng) * 2.0 - 1.0;
      nodes[static_cast<std::size_t>(id)].cover = 1.0 + 9.0 * u(rng);
      nodes[static_cast<std::size_t>(id)].n_samples = 1;
      return;
    }
    const int left = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes.emplace_back();
    auto& n = nodes[static_cast<std::size_t>(id)];
    n.is_leaf = false;
    n.feature = pick(rng);
    n.threshold = u(rng);
    n.left = left;
    n.right = left + 1;
    n.gain = 1.0;
    grow(left, level + 1);
    grow(left + 1, level + 1);
    auto& m = nodes[static_cast<std::size_t>(id)];
    m.cover = nodes[static_cast<std::size_t>(left)].cover + nodes[static_cast<std::size_t>(left + 1)].cover;
    m.n_samples = nodes[static_cast<std::size_t>(left)].n_samples + nodes[static_cast<std::size_t>(left + 1)].n_samples;
  };
  grow(0, 0);
  return gbdt::Tree(std::move(nodes));
}

inline gbdt::Ensemble random_ensemble(std::mt19937_64& rng, std::size_t features, std::size_t trees,
                                      int depth) {
  std::vector<gbdt::Tree> ts;
  for (std::size_t i = 0; i < trees; ++i) ts.push_back(random_tree(rng, features, depth));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return gbdt::Ensemble(features, u(rng), 0.1 + 0.9 * (u(rng) + 1.0) / 2.0, std::move(ts), {}, {});
}

}  // namespace edcrowd::testing

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edcrowd/error.hpp"
#include "edcrowd/gbdt.hpp"
#include "parallel.hpp"

namespace edcrowd::gbdt {

BinMapper BinMapper::numeric(std::vector<double> boundaries) {
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i - 1] < boundaries[i])) {
      throw std::invalid_argument("bin boundaries must be strictly increasing");
    }
  }
  BinMapper m;
  m.boundaries_ = std::move(boundaries);
  return m;
}

BinMapper BinMapper::categorical(std::vector<int> categories) {
  std::sort(categories.begin(), categories.end());
  if (std::adjacent_find(categories.begin(), categories.end()) != categories.end()) {
    throw std::invalid_argument("duplicate category");
  }
  BinMapper m;
  m.categorical_ = true;
  m.categories_ = std::move(categories);
  return m;
}

int BinMapper::num_bins() const {
  return static_cast<int>(categorical_ ? std::max<std::size_t>(categories_.size(), 1)
                                       : boundaries_.size() + 1);
}

std::optional<int> BinMapper::bin_of(double value) const {
  if (categorical_) {
    const auto code = static_cast<int>(value);
    const auto it = std::lower_bound(categories_.begin(), categories_.end(), code);
    if (it == categories_.end() || *it != code || static_cast<double>(code) != value) {
      return std::nullopt;
    }
    return static_cast<int>(it - categories_.begin());
  }
  return static_cast<int>(std::lower_bound(boundaries_.begin(), boundaries_.end(), value) -
                          boundaries_.begin());
}

namespace {

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  // Adjacent doubles: keep the upper value in the upper bin.
  return mid < hi ? mid : lo;
}

BinMapper numeric_bins(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  std::vector<double> boundaries;
  if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      boundaries.push_back(midpoint(distinct[i], distinct[i + 1]));
    }
    return BinMapper::numeric(std::move(boundaries));
  }
  // Equal-frequency cuts: close bin k once the cumulative count reaches
  // k * n / max_bins.
  const double per_bin = static_cast<double>(values.size()) / max_bins;
  std::size_t cumulative = 0;
  int closed = 0;
  for (std::size_t i = 0; i + 1 < distinct.size() && closed < max_bins - 1; ++i) {
    cumulative += counts[i];
    if (static_cast<double>(cumulative) >= per_bin * (closed + 1)) {
      boundaries.push_back(midpoint(distinct[i], distinct[i + 1]));
      ++closed;
    }
  }
  return BinMapper::numeric(std::move(boundaries));
}

BinMapper categorical_bins(const std::vector<double>& values, int max_bins) {
  std::vector<int> cats;
  for (double v : values) {
    const auto code = static_cast<int>(v);
    if (static_cast<double>(code) != v || code < 0) {
      throw DataError("categorical feature values must be non-negative integers");
    }
    cats.push_back(code);
  }
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  if (cats.size() > static_cast<std::size_t>(max_bins)) {
    throw DataError("categorical feature has more categories than max_bins");
  }
  return BinMapper::categorical(std::move(cats));
}

}  // namespace

std::vector<BinMapper> build_bins(const MatrixView& features, const TrainConfig& cfg) {
  cfg.validate();
  if (features.rows() == 0) throw DataError("cannot bin an empty table");
  std::vector<BinMapper> out(features.cols());
  detail::parallel_for(features.cols(), cfg.num_threads, [&](std::size_t f) {
    std::vector<double> column(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) column[r] = features(r, f);
    out[f] = cfg.is_categorical(f) ? categorical_bins(column, cfg.max_bins)
                                   : numeric_bins(std::move(column), cfg.max_bins);
  });
  return out;
}

BinnedData::BinnedData(const MatrixView& features, std::vector<BinMapper> mappers)
    : rows_(features.rows()), mappers_(std::move(mappers)) {
  if (mappers_.size() != features.cols()) throw DataError("bin mapper count mismatch");
  bins_.resize(rows_ * mappers_.size());
  for (std::size_t f = 0; f < mappers_.size(); ++f) {
    const auto& m = mappers_[f];
    if (m.num_bins() > 256) throw DataError("more than 256 bins");
    std::uint8_t* col = bins_.data() + f * rows_;
    for (std::size_t r = 0; r < rows_; ++r) {
      const auto b = m.bin_of(features(r, f));
      if (!b) throw DataError("value outside bin mapper domain in feature " + std::to_string(f));
      col[r] = static_cast<std::uint8_t>(*b);
    }
  }
}

}  // namespace edcrowd::gbdt

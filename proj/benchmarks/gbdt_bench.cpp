#include <benchmark/benchmark.h>

#include <random>

#include "edcrowd/gbdt.hpp"

namespace {

using namespace edcrowd;

struct Data {
  std::size_t rows, cols;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  MatrixView view() const { return MatrixView(values, rows, cols); }
};

Data make_data(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  Data d{rows, cols, {}, {}};
  d.values.resize(rows * cols);
  for (auto& v : d.values) v = z(rng);
  for (std::size_t i = 0; i < rows; ++i) {
    const double s = d.values[i * cols] + 0.5 * d.values[i * cols + 1] + 0.5 * z(rng);
    d.labels.push_back(s > 0.3 ? 1 : 0);
  }
  return d;
}

void BM_BuildBins(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)), 64);
  const gbdt::TrainConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::build_bins(d.view(), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
}
BENCHMARK(BM_BuildBins)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_GrowTree(benchmark::State& state) {
  const auto d = make_data(static_cast<std::size_t>(state.range(0)), 64);
  gbdt::TrainConfig cfg;
  cfg.goss_top_rate = 1.0;
  cfg.goss_other_rate = 0.0;
  const gbdt::BinnedData binned(d.view(), gbdt::build_bins(d.view(), cfg));
  std::vector<double> g(d.rows), h(d.rows, 0.25);
  for (std::size_t i = 0; i < d.rows; ++i) g[i] = 0.5 - d.labels[i];
  const auto sample = gbdt::goss_sample(g, 1.0, 0.0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::grow_tree(binned, g, h, sample, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GrowTree)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto d = make_data(10000, 64);
  gbdt::TrainConfig cfg;
  cfg.num_trees = 50;
  cfg.goss_top_rate = state.range(0) ? 0.2 : 1.0;
  cfg.goss_other_rate = state.range(0) ? 0.1 : 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(gbdt::fit(d.view(), d.labels, cfg));
}
BENCHMARK(BM_Fit)->ArgName("goss")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto d = make_data(10000, 64);
  gbdt::TrainConfig cfg;
  cfg.num_trees = 100;
  const auto model = gbdt::fit(d.view(), d.labels, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(d.view()));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

}  // namespace

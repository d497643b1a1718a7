#include <benchmark/benchmark.h>

#include "admd/augmentation.hpp"
#include "admd/dmd.hpp"
#include "admd/experiment.hpp"
#include "admd/metrics.hpp"
#include "admd/synthetic.hpp"

using namespace admd;

namespace {

const TimeSeries& record() {
  static const auto ts = generate_synthetic(SyntheticKind::QuasiPeriodic, 7, 4000, 1);
  return ts;
}

// Args: niw, nde, nts
void BM_FitWindow(benchmark::State& state) {
  const int niw = int(state.range(0));
  const AugmentationSpec spec{int(state.range(1)), int(state.range(2))};
  for (auto _ : state) {
    auto model = fit_record_window(record(), 100, niw, spec);
    benchmark::DoNotOptimize(model.eigenvalues.data());
  }
  state.counters["dim"] = double(spec.dimension(7));
}
BENCHMARK(BM_FitWindow)
    ->Args({1, 0, 0})
    ->Args({4, 0, 0})
    ->Args({8, 0, 0})
    ->Args({4, 2, 4})
    ->Args({8, 4, 16})
    ->Unit(benchmark::kMillisecond);

void BM_FitDirect(benchmark::State& state) {
  const AugmentationSpec spec{int(state.range(0)), int(state.range(1))};
  const auto pair = build_snapshots(record().slice(100, 356), record().slice(100 - spec.lead_required(), 100), spec);
  for (auto _ : state) {
    auto model = fit_model_direct(pair, record().dt());
    benchmark::DoNotOptimize(model.eigenvalues.data());
  }
}
BENCHMARK(BM_FitDirect)->Args({0, 0})->Args({2, 4})->Args({4, 16})->Unit(benchmark::kMillisecond);

void BM_Forecast(benchmark::State& state) {
  const auto model = fit_record_window(record(), 100, 8, {2, 8});
  const Index horizon = state.range(0);
  for (auto _ : state) {
    auto f = forecast(model, horizon);
    benchmark::DoNotOptimize(f.data());
  }
}
BENCHMARK(BM_Forecast)->Arg(32)->Arg(128);

void BM_Evaluate(benchmark::State& state) {
  const Eigen::MatrixXd meas = record().values().leftCols(state.range(0));
  const Eigen::MatrixXd pred = record().values().middleCols(7, state.range(0));
  for (auto _ : state) {
    auto r = evaluate(pred, meas);
    benchmark::DoNotOptimize(r.nrmse);
  }
}
BENCHMARK(BM_Evaluate)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();

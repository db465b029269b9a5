#include "loel/baselines.hpp"
#include "loel/gp.hpp"
#include "loel/locate.hpp"
#include "loel/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace loel;

namespace {

gp::TrainingSet one_pair(const EventTable& t) {
  gp::TrainingSet ts;
  ts.inputs.resize(static_cast<Eigen::Index>(t.events.size()), 2);
  ts.targets.resize(static_cast<Eigen::Index>(t.events.size()));
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    ts.inputs.row(e) << t.events[i].origin->x, t.events[i].origin->y;
    ts.targets(e) = t.events[i].dtoa[0];
  }
  return ts;
}

EventTable grid(double spacing) {
  synthetic::SyntheticCampaign c;
  c.grid_spacing = spacing;
  return synthetic::generate_grid(c);
}

const gp::Hyperparameters kHp{{60.0, 60.0}, 1e-10, 4e-14};

}  // namespace

static void BM_GpFit(benchmark::State& state) {
  const gp::TrainingSet ts = one_pair(grid(static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(gp::fit(ts, kHp));
  state.counters["points"] = static_cast<double>(ts.size());
}
BENCHMARK(BM_GpFit)->Arg(30)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_GpPredictBatch(benchmark::State& state) {
  const gp::GPModel m = gp::fit(one_pair(grid(10)), kHp);
  const auto pts = locate::make_predictive_grid(default_geometry(), static_cast<double>(state.range(0)));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(pts.points.size()), 2);
  for (std::size_t i = 0; i < pts.points.size(); ++i) x.row(static_cast<Eigen::Index>(i)) << pts.points[i].x, pts.points[i].y;
  Eigen::VectorXd mean(x.rows()), var(x.rows());
  for (auto _ : state) {
    m.predict_batch(x, mean, var);
    benchmark::DoNotOptimize(mean.data());
  }
  state.counters["queries"] = static_cast<double>(pts.points.size());
}
BENCHMARK(BM_GpPredictBatch)->Arg(5)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_GridPrecompute(benchmark::State& state) {
  const locate::ModelBank bank = locate::fit_bank(grid(20), kHp);
  const auto pg = locate::make_predictive_grid(default_geometry(), static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(locate::predict_on_grid(bank, pg));
}
BENCHMARK(BM_GridPrecompute)->Arg(5)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_LocateEvent(benchmark::State& state) {
  const locate::ModelBank bank = locate::fit_bank(grid(20), kHp);
  const auto pg = locate::make_predictive_grid(default_geometry(), 2.0);
  const auto pred = locate::predict_on_grid(bank, pg);
  const auto w = locate::uniform_weights(bank.size());
  const auto y = grid(20).events[7].dtoa;
  for (auto _ : state) benchmark::DoNotOptimize(locate::locate_event(pred, pg, y, w));
}
BENCHMARK(BM_LocateEvent)->Unit(benchmark::kMicrosecond);

static void BM_DeltaTLocate(benchmark::State& state) {
  const EventTable t = grid(10);
  const auto map = baselines::deltaT_fit(t);
  const auto pg = locate::make_predictive_grid(default_geometry(), 1.0);
  const auto table = baselines::tabulate(map, pg);
  for (auto _ : state) benchmark::DoNotOptimize(baselines::deltaT_locate(table, pg, t.events[11].dtoa));
}
BENCHMARK(BM_DeltaTLocate)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();

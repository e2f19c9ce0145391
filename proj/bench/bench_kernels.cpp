// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "weylcheck/curvature.hpp"
#include "weylcheck/metric_models.hpp"
#include "weylcheck/reference.hpp"

namespace {

using namespace weylcheck;

MetricModel model_for(int n) {
  ModelSpec spec;
  spec.name = "twisted_generic";
  spec.n = n;
  return make_model(spec);
}

struct PointFixture {
  explicit PointFixture(int n) : model(model_for(n)), point(sample_points(model, 1, 7).front()) {
    const MetricJets metric = evaluate_metric(model, point);
    connection = christoffel(metric);
    curvature = riemann_ricci_scalar(connection, metric.metric_field(), metric.inverse_field());
  }
  MetricModel model;
  ChartPoint point;
  Connection connection;
  CurvatureFields curvature;
};

void BM_RiemannParallel(benchmark::State& state) {
  const PointFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(riemann_from_connection(f.connection));
}

void BM_RiemannSerial(benchmark::State& state) {
  const PointFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::riemann_from_connection(f.connection));
}

void BM_CovariantDerivativeParallel(benchmark::State& state) {
  const PointFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(covariant_derivative(f.curvature.riemann, f.connection));
}

void BM_CovariantDerivativeSerial(benchmark::State& state) {
  const PointFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::covariant_derivative(f.curvature.riemann, f.connection));
}

void BM_BundlesParallel(benchmark::State& state) {
  const MetricModel model = model_for(static_cast<int>(state.range(0)));
  const auto points = sample_points(model, 32, 42);
  for (auto _ : state) benchmark::DoNotOptimize(build_bundles(model, points));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points.size()));
}

void BM_BundlesSerial(benchmark::State& state) {
  const MetricModel model = model_for(static_cast<int>(state.range(0)));
  const auto points = sample_points(model, 32, 42);
  for (auto _ : state) benchmark::DoNotOptimize(reference::build_bundles(model, points));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points.size()));
}

}  // namespace

BENCHMARK(BM_RiemannParallel)->DenseRange(4, 7);
BENCHMARK(BM_RiemannSerial)->DenseRange(4, 7);
BENCHMARK(BM_CovariantDerivativeParallel)->DenseRange(4, 7);
BENCHMARK(BM_CovariantDerivativeSerial)->DenseRange(4, 7);
BENCHMARK(BM_BundlesParallel)->DenseRange(4, 6)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BundlesSerial)->DenseRange(4, 6)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

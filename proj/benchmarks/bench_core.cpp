#include <benchmark/benchmark.h>

#include "leafcausal/catalog.hpp"
#include "leafcausal/causality.hpp"
#include "leafcausal/curvature.hpp"
#include "leafcausal/dynamics.hpp"

using namespace leafcausal;

namespace {

void BM_RicciForwardDual(benchmark::State& state) {
  const auto& ex = get_example("desitter_warp");
  Vec x = ex.focal->leaf_point;
  x[2] = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(ricci(*ex.g, 0, x));
}
BENCHMARK(BM_RicciForwardDual);

void BM_RicciCentralFd(benchmark::State& state) {
  const auto& ex = get_example("desitter_warp");
  Vec x = ex.focal->leaf_point;
  x[2] = 0.3;
  const auto engine = DerivEngine::central();
  for (auto _ : state) benchmark::DoNotOptimize(ricci(*ex.g, 0, x, engine));
}
BENCHMARK(BM_RicciCentralFd);

void BM_TransverseRicciScan(benchmark::State& state) {
  const auto& ex = get_example("cos_warp");
  ScanConfig cfg;
  for (int i = 0; i < 20; ++i) cfg.points.push_back((Vec(2) << -1.4 + 0.14 * i, 0.0).finished());
  for (auto _ : state)
    benchmark::DoNotOptimize(scan_transverse_ricci_bound(ex.fol, *ex.gt, *ex.orient, 0, 1.0, 1.0, cfg));
}
BENCHMARK(BM_TransverseRicciScan)->Unit(benchmark::kMillisecond);

void BM_HorizontalGeodesic(benchmark::State& state) {
  const auto& ex = get_example("desitter_warp");
  Vec x = ex.focal->leaf_point;
  Vec v = horizontal_lift(ex.fol, *ex.g, 0, x, (Vec(4) << 1.2, 0.5, 0.0, 0.0).finished());
  IntegratorConfig cfg;
  cfg.on_exit = ExitMode::Truncate;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(*ex.g, {0, x, v, 0.0}, 0.2, {}, cfg));
}
BENCHMARK(BM_HorizontalGeodesic)->Unit(benchmark::kMillisecond);

void BM_FocalScan(benchmark::State& state) {
  const auto& ex = get_example("cos_warp", {{"eps", 0.005}});
  const auto& f = *ex.focal;
  for (auto _ : state)
    benchmark::DoNotOptimize(focal_scan(ex.fol, *ex.gt, *ex.g, f.chart, f.leaf_point, f.direction, f.max_param));
}
BENCHMARK(BM_FocalScan)->Unit(benchmark::kMillisecond);

void BM_BuildGraph(benchmark::State& state) {
  const auto& ex = get_example("cos_warp");
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(ex.fol, *ex.gt, *ex.orient, *ex.graph, r, 0.0));
}
BENCHMARK(BM_BuildGraph)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_LongestPath(benchmark::State& state) {
  const auto& ex = get_example("cos_warp");
  auto g = build_graph(ex.fol, *ex.gt, *ex.orient, *ex.graph, 40, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(longest_path_diameter(g));
}
BENCHMARK(BM_LongestPath)->Unit(benchmark::kMillisecond);

void BM_SaturatedReach(benchmark::State& state) {
  const auto& ex = get_example("deleted_segment");
  auto g = build_graph(ex.fol, *ex.gt, *ex.orient, *ex.graph, 40, 0.05);
  auto seeds = g.leaf_nodes(g.nodes[*g.find_node(ex.seed_params.front())].label);
  for (auto _ : state) benchmark::DoNotOptimize(reach(g, seeds, Direction::Future, true));
}
BENCHMARK(BM_SaturatedReach)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

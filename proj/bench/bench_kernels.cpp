// Copyright 2026 The segeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Kernel timings: OpenMP paths against one thread and against the serial
// brute-force references. Arg(0) is the grid edge; threads come from the
// benchmark name suffix.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "fixtures.hpp"
#include "segeval/overlap.hpp"
#include "segeval/surface.hpp"

using namespace segeval;

namespace {

struct Pair {
  BinaryMask a, m;
};

Pair make_pair(std::size_t edge) {
  const Dims d{edge, edge, edge};
  const double c = static_cast<double>(edge) / 2;
  const auto m = fixtures::ellipsoid(d, {1, 1, 1}, c, c, c, 0.3 * edge, 0.22 * edge, 0.35 * edge);
  return {fixtures::shift(fixtures::dilate6(m), 1, 0, -1), m};
}

void with_threads(benchmark::State& state, int threads) {
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
  state.counters["threads"] = threads > 0 ? threads : omp_get_num_procs();
}

void BM_DistanceField(benchmark::State& state, int threads) {
  with_threads(state, threads);
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  const auto s = extract_surface(p.m, CoordinateSpace::Index);
  for (auto _ : state) benchmark::DoNotOptimize(distance_field(s, p.m.dims(), p.m.spacing()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.m.dims().voxel_count()));
}

void BM_DistanceFieldBruteforce(benchmark::State& state) {
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  const auto s = extract_surface(p.m, CoordinateSpace::Index);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::distance_field_bruteforce(s, p.m.dims(), p.m.spacing()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.m.dims().voxel_count()));
}

void BM_ConfusionCounts(benchmark::State& state, int threads) {
  with_threads(state, threads);
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(confusion_counts(p.a, p.m));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.m.dims().voxel_count()));
}

void BM_SurfaceMetricsField(benchmark::State& state, int threads) {
  with_threads(state, threads);
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  const auto a = extract_surface(p.a, CoordinateSpace::Index);
  const auto m = extract_surface(p.m, CoordinateSpace::Index);
  for (auto _ : state)
    benchmark::DoNotOptimize(surface_metrics(a, m, distance_field(a, p.a.dims(), p.a.spacing()),
                                             distance_field(m, p.m.dims(), p.m.spacing())));
}

void BM_SurfaceMetricsBruteforce(benchmark::State& state) {
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  const auto a = extract_surface(p.a, CoordinateSpace::Index);
  const auto m = extract_surface(p.m, CoordinateSpace::Index);
  for (auto _ : state) benchmark::DoNotOptimize(surface_metrics_bruteforce(a, m));
}

void BM_CompareSurfaces(benchmark::State& state, int threads) {
  with_threads(state, threads);
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compare_surfaces(p.a, p.m, {}));
}

}  // namespace

BENCHMARK_CAPTURE(BM_DistanceField, serial, 1)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DistanceField, parallel, 0)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceFieldBruteforce)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ConfusionCounts, serial, 1)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_ConfusionCounts, parallel, 0)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_SurfaceMetricsField, serial, 1)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SurfaceMetricsField, parallel, 0)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SurfaceMetricsBruteforce)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CompareSurfaces, parallel, 0)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

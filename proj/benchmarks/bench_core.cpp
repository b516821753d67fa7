#include <benchmark/benchmark.h>

#include <random>

#include "symkor/interpolant.hpp"
#include "symkor/multiindex.hpp"
#include "symkor/quadrature.hpp"
#include "symkor/sqrelu_net.hpp"
#include "symkor/symmetry.hpp"

using namespace symkor;

namespace {

std::vector<std::vector<double>> random_points(int d, int count) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& p : pts) {
    for (auto& c : p) c = u(rng);
  }
  return pts;
}

}  // namespace

static void BM_CountGridPoints(benchmark::State& state) {
  const IndexSetSpec spec{IndexSetKind::EnergyBased, static_cast<int>(state.range(1)), static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(count_grid_points(spec, true));
}
BENCHMARK(BM_CountGridPoints)->Args({6, 8})->Args({12, 6});

static void BM_CanonicalOrbits(benchmark::State& state) {
  const IndexSetSpec spec{IndexSetKind::EnergyBased, static_cast<int>(state.range(1)), static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(canonical_orbits(spec));
}
BENCHMARK(BM_CanonicalOrbits)->Args({3, 8})->Args({5, 6});

static void BM_VandermondeSolve(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vandermonde_coefficients(d));
}
BENCHMARK(BM_VandermondeSolve)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_BuildInterpolant(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const bool symmetric = state.range(1) != 0;
  const auto f = builtin_target("prod_sine", d);
  const IndexSetSpec spec{IndexSetKind::EnergyBased, 6, d};
  for (auto _ : state) benchmark::DoNotOptimize(build_interpolant(f, spec, symmetric));
}
BENCHMARK(BM_BuildInterpolant)->Args({3, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);

static void BM_EvaluateTable(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const bool symmetric = state.range(1) != 0;
  const auto table = build_interpolant(builtin_target("prod_sine", d), {IndexSetKind::EnergyBased, 6, d}, symmetric);
  const auto pts = random_points(d, 1024);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(table.evaluate(pts[k++ & 1023]));
}
BENCHMARK(BM_EvaluateTable)->Args({2, 0})->Args({2, 1})->Args({3, 0})->Args({3, 1});

static void BM_NetForward(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto table = build_interpolant(builtin_target("prod_sine", d), {IndexSetKind::EnergyBased, 3, d}, true);
  const auto net = assemble_full_net(table, 1.0 / 64, false).net;
  const auto pts = random_points(d, 1024);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(net.value(pts[k++ & 1023]));
}
BENCHMARK(BM_NetForward)->DenseRange(1, 3);

static void BM_NetGradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto table = build_interpolant(builtin_target("prod_sine", d), {IndexSetKind::EnergyBased, 3, d}, true);
  const auto net = assemble_full_net(table, 1.0 / 64, false).net;
  const auto pts = random_points(d, 1024);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(net.evaluate(pts[k++ & 1023]));
}
BENCHMARK(BM_NetGradient)->DenseRange(1, 3);

static void BM_EnergyErrorTensor(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = builtin_target("prod_sine", 2);
  const auto table = build_interpolant(f, {IndexSetKind::EnergyBased, n, 2}, false);
  const auto q = default_quadrature(2, n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(norm_diff(make_field(f), make_field(table), q));
}
BENCHMARK(BM_EnergyErrorTensor)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

// Serial reference vs OpenMP pair kernels on the unit square, h = 1/n, delta = 4h.

#include <benchmark/benchmark.h>

#include <memory>

#include <random>
#include <vector>

#include "nlkelvin/geometry.hpp"
#include "nlkelvin/operators.hpp"
#include "nlkelvin/pair_kernels.hpp"

namespace {

using namespace nlkelvin;

struct Fixture {
  Discretization disc;
  kernels::PairTopology t;
  std::vector<double> u, q, v, w;

  explicit Fixture(int n)
      : disc(Discretization::build(Domain::unit(2), 1.0 / n, KernelSpec(KernelFamily::TruncatedTent, 4.0 / n, 2))),
        t(topology(disc.pairs)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto fill = [&](std::size_t size) {
      std::vector<double> out(size);
      for (double& x : out) x = dist(rng);
      return out;
    };
    u = fill(t.num_cells());
    q = fill(t.num_pairs());
    v = fill(3 * t.num_cells());
    w = fill(t.num_pairs());
  }
};

const Fixture& fixture(int n) {
  static std::vector<std::unique_ptr<Fixture>> cache;
  for (const auto& f : cache) {
    if (f->disc.mesh.interior_extent()[0] == n) return *f;
  }
  cache.push_back(std::make_unique<Fixture>(n));
  return *cache.back();
}

template <auto Kernel>
void gradient(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  std::vector<double> out(f.t.num_pairs());
  for (auto _ : state) {
    Kernel(f.t, f.u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.t.num_pairs()));
}

template <auto Kernel>
void divergence(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  std::vector<double> out(f.t.num_cells());
  for (auto _ : state) {
    Kernel(f.t, f.q, -2.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.t.num_pairs()));
}

template <auto Kernel>
void recovery(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  std::vector<double> out(3 * f.t.num_cells());
  for (auto _ : state) {
    Kernel(f.t, f.q, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.t.num_pairs()));
}

template <auto Kernel>
void weighted_dot(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.q, f.w, f.q));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.t.num_pairs()));
}

}  // namespace

BENCHMARK(gradient<kernels::serial::gradient>)->Name("gradient/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(gradient<kernels::omp::gradient>)->Name("gradient/omp")->Arg(64)->Arg(128)->Arg(256)->UseRealTime();
BENCHMARK(divergence<kernels::serial::divergence>)->Name("divergence/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(divergence<kernels::omp::divergence>)->Name("divergence/omp")->Arg(64)->Arg(128)->Arg(256)->UseRealTime();
BENCHMARK(recovery<kernels::serial::recovery>)->Name("recovery/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(recovery<kernels::omp::recovery>)->Name("recovery/omp")->Arg(64)->Arg(128)->Arg(256)->UseRealTime();
BENCHMARK(weighted_dot<kernels::serial::weighted_dot>)->Name("weighted_dot/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(weighted_dot<kernels::omp::weighted_dot>)->Name("weighted_dot/omp")->Arg(64)->Arg(128)->Arg(256)->UseRealTime();

BENCHMARK_MAIN();

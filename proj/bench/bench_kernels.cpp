// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "tnqst/kernels.hpp"
#include "tnqst/network.hpp"
#include "tnqst/povm.hpp"
#include "tnqst/rng.hpp"

namespace {

using namespace tnqst;
using kernels::Exec;

struct Grid {
  std::vector<std::vector<cplx>> storage;
  std::vector<kernels::SiteView> views;
  int q, p;
};

Grid make_grid(int q, int p, int phys, int bond) {
  auto rng = make_stream(1, {});
  Grid g{{}, {}, q, p};
  g.storage.resize(static_cast<std::size_t>(q * p));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < p; ++b) {
      const std::array<int, 4> bonds{b > 0 ? bond : 1, a > 0 ? bond : 1, b + 1 < p ? bond : 1,
                                     a + 1 < q ? bond : 1};
      auto& data = g.storage[a * p + b];
      data.resize(static_cast<std::size_t>(phys * bonds[0] * bonds[1] * bonds[2] * bonds[3]));
      for (auto& x : data) x = complex_normal(rng);
      g.views.push_back({data.data(), phys, bonds});
    }
  return g;
}

template <Exec E>
void BM_Sweep(benchmark::State& state) {
  const int phys = static_cast<int>(state.range(0));
  const Grid g = make_grid(3, 3, phys, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sweep_contract(g.q, g.p, g.views, E));
}
BENCHMARK(BM_Sweep<Exec::reference>)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<Exec::omp>)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

struct ProbSetup {
  CMatrix vectors;
  CMatrix rho;
  CVector u;
  std::vector<double> out;
};

ProbSetup prob_setup(int n) {
  auto rng = make_stream(2, {});
  const auto design = stabilizer_design(n);
  const std::size_t d = design.dim();
  return {design.vectors, random_density(d, d, rng), random_unit_vector(d, rng), std::vector<double>(design.size())};
}

void BM_ProbsMixedReference(benchmark::State& state) {
  auto s = prob_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) kernels::reference::probs_mixed(s.vectors, 1.0, s.rho, s.out);
}
void BM_ProbsMixedOmp(benchmark::State& state) {
  auto s = prob_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) kernels::omp::probs_mixed(s.vectors, 1.0, s.rho, s.out);
}
void BM_ProbsPureReference(benchmark::State& state) {
  auto s = prob_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) kernels::reference::probs_pure(s.vectors, 1.0, s.u, s.out);
}
void BM_ProbsPureOmp(benchmark::State& state) {
  auto s = prob_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) kernels::omp::probs_pure(s.vectors, 1.0, s.u, s.out);
}
BENCHMARK(BM_ProbsMixedReference)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ProbsMixedOmp)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ProbsPureReference)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ProbsPureOmp)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_AdjointReference(benchmark::State& state) {
  auto s = prob_setup(static_cast<int>(state.range(0)));
  CMatrix out = CMatrix::Zero(s.rho.rows(), s.rho.cols());
  for (auto _ : state) kernels::reference::adjoint_accumulate(s.vectors, 1.0, s.out, out);
}
void BM_AdjointOmp(benchmark::State& state) {
  auto s = prob_setup(static_cast<int>(state.range(0)));
  CMatrix out = CMatrix::Zero(s.rho.rows(), s.rho.cols());
  for (auto _ : state) kernels::omp::adjoint_accumulate(s.vectors, 1.0, s.out, out);
}
BENCHMARK(BM_AdjointReference)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AdjointOmp)->Arg(3)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_FramePotentialReference(benchmark::State& state) {
  const auto v = stabilizer_design(static_cast<int>(state.range(0))).vectors;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::frame_potential(v, 3));
}
void BM_FramePotentialOmp(benchmark::State& state) {
  const auto v = stabilizer_design(static_cast<int>(state.range(0))).vectors;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::frame_potential(v, 3));
}
BENCHMARK(BM_FramePotentialReference)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FramePotentialOmp)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

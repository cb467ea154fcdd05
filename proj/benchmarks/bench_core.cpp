#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "wavenet/chain.hpp"
#include "wavenet/counterex.hpp"
#include "wavenet/dynamics.hpp"
#include "wavenet/resolvent.hpp"
#include "wavenet/spectra.hpp"

using namespace wavenet;

namespace {

std::shared_ptr<const MetricGraph> pi_tree() {
  return std::make_shared<const MetricGraph>(build_graph({Variant::Tree,
                                                          {{"R", VertexKind::root()},
                                                           {"a", VertexKind::interior(1)},
                                                           {"b", VertexKind::controlled()},
                                                           {"c", VertexKind::controlled()}},
                                                          {{"e1", "R", "a", parse_length("1")},
                                                           {"e2", "a", "b", parse_length("3/2")},
                                                           {"e3", "a", "c", parse_length("2")}}}));
}

void BM_CharDet(benchmark::State& st) {
  const auto g = pi_tree();
  const cplx z(-0.3, 7.1);
  for (auto _ : st) benchmark::DoNotOptimize(normalized_det(*g, z));
}
BENCHMARK(BM_CharDet);

void BM_LeapfrogStep(benchmark::State& st) {
  const auto g = pi_tree();
  const Discretization d = discretize(g, static_cast<double>(st.range(0)));
  NetworkState s = init_state(d, {});
  std::mt19937 rng(1);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < d.dofs; ++i) s.u[i] = n(rng), s.w[i] = n(rng);
  const Leapfrog lf(d, 0.5 * d.h_min());
  for (auto _ : st) benchmark::DoNotOptimize(lf.advance(s));
  st.SetItemsProcessed(st.iterations() * d.dofs);
}
BENCHMARK(BM_LeapfrogStep)->Arg(40)->Arg(160)->Arg(640);

void BM_ResolventNorm(benchmark::State& st) {
  const auto gen = assemble_generator(pi_tree(), 1.0 / static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(resolvent_norm(gen, 3.7).norm);
}
BENCHMARK(BM_ResolventNorm)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_DeltaRecurrence(benchmark::State& st) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<double> x(st.range(0)), c(st.range(0) - 1);
  for (auto& v : x) v = u(rng);
  for (auto& v : c) v = u(rng);
  for (auto _ : st) benchmark::DoNotOptimize(delta_recurrence(x, c).delta);
}
BENCHMARK(BM_DeltaRecurrence)->Arg(8)->Arg(64);

void BM_CircuitProbes(benchmark::State& st) {
  const Length l4 = parse_length("sqrt(2)");
  for (auto _ : st) {
    for (const auto& pq : dirichlet_convergents(l4, 17)) benchmark::DoNotOptimize(circuit_solve(pq, l4.value).b[0]);
  }
}
BENCHMARK(BM_CircuitProbes)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

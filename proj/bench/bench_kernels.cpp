#include <benchmark/benchmark.h>

#include <random>

#include "isochar/shimura.hpp"

using namespace isochar;

namespace {

const GraphModule& edge_module() {
  static GraphModule m = build_edge_module(13, 11, 2);
  return m;
}

struct Sweep {
  HomModule hom;
  std::vector<IntVector> coords;
};

const Sweep& sweep() {
  static Sweep s = [] {
    CaseData c = build_case(11, 7);
    Sweep out{hom_module(c.x_p_new, dual(c.y_q)), {}};
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> dist(-8, 8);
    for (int i = 0; i < 2048; ++i) {
      IntVector v(out.hom.maps.size());
      for (auto& x : v) x = dist(rng);
      out.coords.push_back(v);
    }
    return out;
  }();
  return s;
}

void BM_HeckeColumns(benchmark::State& st) {
  const auto& m = edge_module();
  for (auto _ : st) benchmark::DoNotOptimize(hecke_operator(m, st.range(0)));
}

void BM_HeckeColumnsSerial(benchmark::State& st) {
  const auto& m = edge_module();
  for (auto _ : st) benchmark::DoNotOptimize(hecke_operator_serial(m, st.range(0)));
}

void BM_SweepDeterminants(benchmark::State& st) {
  const auto& s = sweep();
  for (auto _ : st) benchmark::DoNotOptimize(candidate_determinants(s.hom, s.coords));
  st.SetItemsProcessed(st.iterations() * s.coords.size());
}

void BM_SweepDeterminantsSerial(benchmark::State& st) {
  const auto& s = sweep();
  for (auto _ : st) benchmark::DoNotOptimize(candidate_determinants_serial(s.hom, s.coords));
  st.SetItemsProcessed(st.iterations() * s.coords.size());
}

}  // namespace

BENCHMARK(BM_HeckeColumns)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeckeColumnsSerial)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepDeterminants)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepDeterminantsSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

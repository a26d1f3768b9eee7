#include <benchmark/benchmark.h>

#include "nlzcav/angular.hpp"
#include "nlzcav/experiments.hpp"
#include "nlzcav/hom.hpp"

using namespace nlzcav;

namespace {

const AtomData& data() {
  static const AtomData d = AtomData::load_default();
  return d;
}

void BM_Wigner3j(benchmark::State& state) {
  const auto h = [](int t) { return HalfInt::from_twice(t); };
  for (auto _ : state) benchmark::DoNotOptimize(wigner_3j(h(3), h(2), h(5), h(1), h(0), h(-1)));
}
BENCHMARK(BM_Wigner3j);

void BM_Wigner6j(benchmark::State& state) {
  const auto h = [](int t) { return HalfInt::from_twice(t); };
  for (auto _ : state) benchmark::DoNotOptimize(wigner_6j(h(1), h(3), h(2), h(4), h(3), h(3)));
}
BENCHMARK(BM_Wigner6j);

void BM_DiagonalizeD2Excited(benchmark::State& state) {
  const auto& lvl = data().line("D2").excited;
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_level(lvl, 20 * kTeslaPerGauss, data().constants));
}
BENCHMARK(BM_DiagonalizeD2Excited);

void BM_D2PhotonProduction(benchmark::State& state) {
  const Scenario& s = find_preset("D2-current");
  const auto sys = build_scenario_system(s, mhz_to_angular(20), data());
  const Pulse p = raman_resonant_pulse(sys, s.pulse, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_photon_production(sys, p, 1).eta);
}
BENCHMARK(BM_D2PhotonProduction)->Unit(benchmark::kMillisecond);

void BM_HomCurve(benchmark::State& state) {
  const auto m = WavepacketModel::fitted_d2(0.12);
  const auto w = PairWeights::from_contamination(0.12, 0.12);
  std::vector<double> tau;
  for (int i = -300; i <= 300; ++i) tau.push_back(i * 2e-9);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_pair_interference(m, w, tau).P_para.back());
}
BENCHMARK(BM_HomCurve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <spdc/coincidence.hpp>
#include <spdc/phase_matching.hpp>
#include <spdc/polarizability.hpp>
#include <spdc/pump_spectrum.hpp>

#include <cmath>

using namespace spdc;
using optics::kPi;

namespace {

engine::ScenarioConfig reference(int n) {
  engine::ScenarioConfig s;
  s.crystal = optics::bbo_preset();
  s.pump = pump::PumpBeam::in_crystal(s.crystal, 0.3511, 4, 0, 2.0e4);
  s.wavelengths = matching::Wavelengths::degenerate(0.3511);
  s.idler_detector = optics::Direction::lab(0.0813, 0.0);
  s.signal_theta = {0.066, 0.096, n};
  s.signal_phi = {kPi - 0.2, kPi + 0.2, n};
  return s;
}

void BM_RingSolve(benchmark::State &state) {
  auto s = reference(2);
  matching::IndexModel model(s.crystal, s.pump, s.wavelengths);
  auto phi = engine::uniform_azimuths(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matching::solve_rings(model, s.pump, phi));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RingSolve)->Arg(36)->Arg(360)->Unit(benchmark::kMillisecond);

void BM_CoincidenceGrid(benchmark::State &state) {
  auto s = reference(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(engine::coincidence_grid(s, static_cast<int>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_CoincidenceGrid)->Args({64, 1})->Args({256, 1})->Args({256, 4})->Unit(benchmark::kMillisecond);

void BM_PsiAnalytic(benchmark::State &state) {
  auto s = reference(2);
  auto dk = pump::DeltaK::from_xi(s.pump, 4.0, 0.3, 1e-4);
  for (auto _ : state) benchmark::DoNotOptimize(pump::psi_tilde_analytic(s.pump, s.crystal.length_um, dk));
}
BENCHMARK(BM_PsiAnalytic);

void BM_PsiNumeric(benchmark::State &state) {
  auto s = reference(2);
  s.pump = pump::PumpBeam::in_crystal(s.crystal, 0.3511, static_cast<int>(state.range(0)), 0, 1.0e4);
  auto dk = pump::DeltaK::from_xi(s.pump, 2.0, 0.3, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(pump::psi_tilde_numeric(s.pump, 100.0, 0.0, dk));
}
BENCHMARK(BM_PsiNumeric)->Arg(0)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Polarizability(benchmark::State &state) {
  auto d = chi2::DTensor::bbo_dominant(2.3, 2.2, 0.08);
  auto ds = optics::Direction::crystal(0.8, 1.1), di = optics::Direction::crystal(0.85, 4.2);
  for (auto _ : state) {
    auto p = chi2::polarizability_vector(d, chi2::PolarizationCase::OE, ds, di);
    benchmark::DoNotOptimize(chi2::to_lab(p, 0.867, 0.0));
  }
}
BENCHMARK(BM_Polarizability);

} // namespace
BENCHMARK_MAIN();

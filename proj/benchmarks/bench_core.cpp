#include <vector>

#include <benchmark/benchmark.h>

#include "squeezelab/decoherence.hpp"
#include "squeezelab/detection.hpp"
#include "squeezelab/interferometer.hpp"
#include "squeezelab/opo.hpp"
#include "squeezelab/spectrum.hpp"

using namespace squeezelab;

namespace {

std::vector<double> linear(double lo, double hi, int n) {
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = lo + (hi - lo) * i / (n - 1);
  return f;
}

void BM_OpoSpectrum(benchmark::State& state) {
  OpoParams p;
  p.pump_ratio = pump_ratio_from_gain(63.0);
  p.half_linewidth = 1e7;
  const auto f = linear(0.0, 5e7, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(opo_spectrum(p, f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OpoSpectrum)->Arg(1000)->Arg(100000);

void BM_FitLossPhase(benchmark::State& state) {
  DecoherenceModel m;
  m.gain = 63.0;
  m.intrinsic_loss = 0.056;
  m.phase_noise = PhaseNoise::from_degrees(1.2);
  m.gamma = 1e7;
  std::vector<SqueezeMeasurement> data;
  for (int i = 0; i < 6; ++i) {
    const SqueezeDb db = forward_model(m, 0.1 * i);
    data.push_back({0.1 * i, db.squeeze_db, db.antisqueeze_db});
  }
  FitOptions o;
  o.gain = 63.0;
  o.gamma = 1e7;
  o.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_loss_phase(data, o));
}
BENCHMARK(BM_FitLossPhase)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BhdSeries(benchmark::State& state) {
  DetectorParams det;
  det.quantum_efficiency = 0.995;
  det.visibility = 0.99;
  const GaussianState s = squeeze(vacuum(), SqueezeSetting::from_db(10.0, 0.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bhd_series(s, 0.0, 0.0, det, state.range(0), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BhdSeries)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_WelchPsd(benchmark::State& state) {
  DetectorParams det;
  const TimeSeries ts = bhd_series(vacuum(), 0.0, 0.0, det, 1 << 20, 1);
  const double rbw = det.sample_rate / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(welch_psd(ts, rbw));
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_WelchPsd)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_QuantumNoiseBudget(benchmark::State& state) {
  IfoConfig cfg;
  cfg.injected_squeeze = SqueezeSetting::from_db(10.0, kShotNoiseSqueezeAngle);
  cfg.filter_cavity = matched_filter_cavity(cfg);
  const auto f = linear(1.0, 1e4, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quantum_noise_budget(cfg, f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuantumNoiseBudget)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();

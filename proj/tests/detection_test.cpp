#include "squeezelab/detection.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "squeezelab/errors.hpp"

using namespace squeezelab;

namespace {

const double kTenDbR = std::log(10.0) / 2.0;

LightSource long_coherence_source() {
  LightSource s;
  s.coherence_time = 1.0;
  return s;
}

MeasurementWindowing windows(std::int64_t n) {
  MeasurementWindowing w;
  w.window = 1e-6;
  w.n_windows = n;
  return w;
}

// Amplitude-squeezed bright state with N photons per window.
GaussianState bright_squeezed(double n_bar, double r, double theta = 0.0) {
  return displace(squeeze(vacuum(), SqueezeSetting(r, theta)), std::sqrt(n_bar), 0);
}

}  // namespace

TEST(PhotonRecord, CoherentIsPoissonian) {
  const auto rec = sample_photon_record(coherent(std::sqrt(1000.0), 0.0),
                                        long_coherence_source(), windows(100000), 7);
  EXPECT_EQ(rec.counts.size(), 100000u);
  EXPECT_DOUBLE_EQ(rec.mean_photons, 1000.0);
  EXPECT_NEAR(rec.sample_mean(), 1000.0, 0.5);
  EXPECT_NEAR(fano_factor(rec), 1.0, 3.0 / std::sqrt(100000.0));
}

TEST(PhotonRecord, AmplitudeSqueezedIsSubPoissonian) {
  const auto rec = sample_photon_record(bright_squeezed(1000.0, kTenDbR),
                                        long_coherence_source(), windows(100000), 8);
  EXPECT_NEAR(fano_factor(rec), 0.1, 0.01);
}

TEST(PhotonRecord, VacuumGivesZeros) {
  const auto rec =
      sample_photon_record(vacuum(), long_coherence_source(), windows(50), 1);
  for (auto c : rec.counts) EXPECT_EQ(c, 0);
  EXPECT_THROW(fano_factor(rec), ValidationError);
}

TEST(PhotonRecord, Guards) {
  // Dim squeezed light is outside the Gaussian regime.
  EXPECT_THROW(sample_photon_record(bright_squeezed(50.0, 0.5),
                                    long_coherence_source(), windows(10), 1),
               ValidationError);
  // Window not short compared to the coherence time.
  LightSource short_source;
  short_source.coherence_time = 5e-6;
  EXPECT_THROW(sample_photon_record(coherent(10, 0), short_source, windows(10), 1),
               ValidationError);
}

TEST(PhotonRecord, FanoOfConstantCounts) {
  PhotonRecord rec;
  rec.counts = {5, 5, 5, 5};
  EXPECT_DOUBLE_EQ(fano_factor(rec), 0.0);
  rec.counts = {5};
  EXPECT_THROW(fano_factor(rec), ValidationError);
}

TEST(PhotonRecord, DeterministicAcrossThreads) {
  const auto state = bright_squeezed(500.0, 0.4);
  const auto a = sample_photon_record(state, long_coherence_source(), windows(300000), 99, 1);
  const auto b = sample_photon_record(state, long_coherence_source(), windows(300000), 99, 4);
  const auto c = sample_photon_record(state, long_coherence_source(), windows(300000), 100, 1);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
}

TEST(PhotonRecord, PhotonsPerWindow) {
  LightSource s;
  s.power = 1e-9;
  s.wavelength = 1064e-9;
  const double n = photons_per_window(s, windows(1));
  // 1 nW * 1 us / (h c / 1064 nm)
  EXPECT_NEAR(n, 1e-15 / (6.62607015e-34 * 299792458.0 / 1064e-9), 1e-9);
  EXPECT_NEAR(n, 5356.4, 0.1);
}

TEST(SinglePd, ShotNoiseBaselineAndDarkNoise) {
  DetectorParams det;
  det.dark_noise_variance = 0.25;
  const auto ts = single_pd_series(coherent(20, 0), long_coherence_source(), det,
                                   400000, 3);
  EXPECT_NEAR(ts.variance(), 1.25, 0.015);
  EXPECT_NEAR(ts.mean(), 0.0, 0.01);
}

TEST(SinglePd, SeesOnlyAmplitudeQuadrature) {
  DetectorParams det;
  const auto amp = single_pd_series(bright_squeezed(1e4, kTenDbR, 0.0),
                                    long_coherence_source(), det, 400000, 4);
  EXPECT_NEAR(amp.variance(), 0.1, 0.002);
  const auto phase = single_pd_series(
      bright_squeezed(1e4, kTenDbR, std::numbers::pi / 2), long_coherence_source(),
      det, 400000, 5);
  EXPECT_NEAR(phase.variance(), 10.0, 0.1);
  EXPECT_THROW(single_pd_series(coherent(1, 0), long_coherence_source(), det, 10, 1),
               ValidationError);
}

TEST(SinglePd, QuantumEfficiencyLoss) {
  DetectorParams det;
  det.quantum_efficiency = 0.8;
  const auto ts = single_pd_series(bright_squeezed(1e4, kTenDbR, 0.0),
                                   long_coherence_source(), det, 400000, 6);
  EXPECT_NEAR(ts.variance(), 0.8 * 0.1 + 0.2, 0.004);
}

TEST(Bhd, VacuumIsShotNoiseAtEveryAngle) {
  DetectorParams det;
  for (int k = 0; k < 8; ++k) {
    const double theta = k * std::numbers::pi / 8;
    const auto ts = bhd_series(vacuum(), theta, 0.0, det, 200000, 10 + k);
    EXPECT_NEAR(ts.variance(), 1.0, 0.015);
  }
}

TEST(Bhd, TracesQuadratureVariance) {
  const GaussianState state = squeeze(vacuum(), SqueezeSetting(0.6, 0.3));
  DetectorParams det;
  for (int k = 0; k < 8; ++k) {
    const double theta = k * std::numbers::pi / 8;
    const auto ts = bhd_series(state, theta, 0.0, det, 200000, 20 + k);
    const double expected = quadrature_variance(state, theta);
    EXPECT_NEAR(ts.variance() / expected, 1.0, 0.015) << theta;
  }
}

TEST(Bhd, DetectorLossFromEfficiencyAndVisibility) {
  DetectorParams det;
  det.quantum_efficiency = 0.995;
  det.visibility = 0.99;
  const auto ts = bhd_series(squeeze(vacuum(), SqueezeSetting(kTenDbR, 0.0)), 0.0,
                             0.0, det, 1000000, 30);
  const double eta = 0.995 * 0.99 * 0.99;
  EXPECT_NEAR(ts.variance(), eta * 0.1 + (1 - eta), 0.001);
  EXPECT_NEAR(db_from_variance(ts.variance()), -9.13, 0.05);
}

TEST(Bhd, BalancingCancelsLoNoise) {
  const GaussianState state = squeeze(vacuum(), SqueezeSetting(kTenDbR, 0.0));
  DetectorParams quiet;
  DetectorParams noisy;
  noisy.lo_technical_noise = 100.0;
  const auto a = bhd_series(state, 0.0, 0.0, quiet, 100000, 31);
  const auto b = bhd_series(state, 0.0, 0.0, noisy, 100000, 31);
  EXPECT_NEAR(b.variance() / a.variance(), 1.0, 1e-12);

  // An imbalanced splitter lets (2 eps)^2 of the LO noise through.
  noisy.balance_asymmetry = 0.01;
  const auto c = bhd_series(state, 0.0, 0.0, noisy, 400000, 31);
  EXPECT_NEAR(c.variance(), 0.1 + 4e-4 * 100.0, 0.003);
}

TEST(Bhd, DarkNoiseAddsLinearly) {
  DetectorParams det;
  det.dark_noise_variance = 0.5;
  const auto ts = bhd_series(squeeze(vacuum(), SqueezeSetting(kTenDbR, 0.0)), 0.0,
                             0.0, det, 400000, 32);
  EXPECT_NEAR(ts.variance(), 0.6, 0.006);
}

TEST(Bhd, Guards) {
  DetectorParams det;
  EXPECT_THROW(bhd_series(vacuum(), 0.0, 0.01, det, 10, 1), ValidationError);
  det.visibility = 0.0;
  EXPECT_THROW(bhd_series(vacuum(), 0.0, 0.0, det, 10, 1), ValidationError);
}

TEST(Bhd, DeterministicAcrossThreads) {
  DetectorParams det;
  const auto a = bhd_series(vacuum(), 0.2, 0.0, det, 250000, 77, 1);
  const auto b = bhd_series(vacuum(), 0.2, 0.0, det, 250000, 77, 3);
  EXPECT_EQ(a.samples, b.samples);
}

TEST(Modulation, AddsSinusoid) {
  TimeSeries ts;
  ts.sample_rate = 1000.0;
  ts.samples.assign(1000, 0.0);
  EXPECT_EQ(add_signal_modulation(ts, 100.0, 0.0).samples, ts.samples);
  const auto m = add_signal_modulation(ts, 100.0, 2.0);
  EXPECT_NEAR(m.samples[0], 0.0, 1e-12);
  EXPECT_NEAR(m.samples[1], 2.0 * std::sin(2 * std::numbers::pi * 0.1), 1e-12);
  EXPECT_THROW(add_signal_modulation(ts, 500.0, 1.0), ValidationError);
}

#include "squeezelab/detection.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "squeezelab/errors.hpp"
#include "squeezelab/random.hpp"

namespace squeezelab {
namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kSpeedOfLight = 299792458.0;

// Below this photon number per window the Gaussian approximation of
// sub-Poissonian counts is not trusted.
constexpr double kGaussianRegimePhotons = 100.0;

bool is_shot_noise_limited(const GaussianState& state) {
  return (state.cov - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-9;
}

double amplitude_angle(const GaussianState& state) {
  return std::atan2(state.mean.y(), state.mean.x());
}

void require_sample_count(std::int64_t n_samples) {
  detail::require(n_samples > 0, "number of samples must be > 0");
}

}  // namespace

void LightSource::validate() const {
  detail::require(wavelength > 0.0, "wavelength must be > 0");
  detail::require(power > 0.0, "power must be > 0");
  detail::require(coherence_time > 0.0, "coherence time must be > 0");
}

void MeasurementWindowing::validate() const {
  detail::require(window > 0.0, "measurement window must be > 0");
  detail::require(n_windows > 0, "number of windows must be > 0");
}

double PhotonRecord::sample_mean() const {
  if (counts.empty()) return 0.0;
  long double sum = 0.0;
  for (auto c : counts) sum += static_cast<long double>(c);
  return static_cast<double>(sum / counts.size());
}

void DetectorParams::validate() const {
  detail::require_fraction(quantum_efficiency, "quantum efficiency");
  detail::require_fraction(visibility, "visibility");
  detail::require_fraction(balance_asymmetry, "balance asymmetry");
  detail::require(dark_noise_variance >= 0.0, "dark noise variance must be >= 0");
  detail::require(lo_technical_noise >= 0.0, "LO technical noise must be >= 0");
  detail::require(sample_rate > 0.0, "sample rate must be > 0");
}

double DetectorParams::homodyne_efficiency() const {
  return quantum_efficiency * visibility * visibility;
}

double TimeSeries::mean() const {
  if (samples.empty()) return 0.0;
  long double sum = 0.0;
  for (double s : samples) sum += s;
  return static_cast<double>(sum / samples.size());
}

double TimeSeries::variance() const {
  if (samples.size() < 2) return 0.0;
  const double m = mean();
  long double sum = 0.0;
  for (double s : samples) sum += (s - m) * (s - m);
  return static_cast<double>(sum / (samples.size() - 1));
}

double photons_per_window(const LightSource& source,
                          const MeasurementWindowing& windowing) {
  source.validate();
  windowing.validate();
  const double photon_energy = kPlanck * kSpeedOfLight / source.wavelength;
  return source.power * windowing.window / photon_energy;
}

PhotonRecord sample_photon_record(const GaussianState& state,
                                  const LightSource& source,
                                  const MeasurementWindowing& windowing,
                                  std::uint64_t seed, int threads) {
  validate(state);
  source.validate();
  windowing.validate();
  detail::require(windowing.window < source.coherence_time / 10.0,
                  "measurement window must be shorter than a tenth of the "
                  "coherence time for the windows to form an ensemble");

  PhotonRecord record;
  record.windowing = windowing;
  record.seed = seed;
  record.mean_photons = displacement_photon_number(state);
  record.counts.assign(static_cast<std::size_t>(windowing.n_windows), 0);

  const double n_bar = record.mean_photons;
  if (is_shot_noise_limited(state)) {
    if (n_bar == 0.0) return record;
    for_each_chunk(record.counts.size(), seed, threads,
                   [&](Engine& engine, std::size_t begin, std::size_t end) {
                     std::poisson_distribution<std::int64_t> poisson(n_bar);
                     for (std::size_t i = begin; i < end; ++i) {
                       record.counts[i] = poisson(engine);
                     }
                   });
    return record;
  }

  detail::require(n_bar >= kGaussianRegimePhotons,
                  "squeezed photon records need >= 100 photons per window, got " +
                      std::to_string(n_bar));
  const double v_amplitude = quadrature_variance(state, amplitude_angle(state));
  const double sigma = std::sqrt(v_amplitude * n_bar);
  for_each_chunk(record.counts.size(), seed, threads,
                 [&](Engine& engine, std::size_t begin, std::size_t end) {
                   std::normal_distribution<double> normal(n_bar, sigma);
                   for (std::size_t i = begin; i < end; ++i) {
                     record.counts[i] = std::max<std::int64_t>(
                         0, std::llround(normal(engine)));
                   }
                 });
  return record;
}

double fano_factor(const PhotonRecord& record) {
  detail::require(record.counts.size() >= 2, "Fano factor needs >= 2 windows");
  const double mean = record.sample_mean();
  detail::require(mean > 0.0, "Fano factor is undefined for zero mean counts");
  long double sum = 0.0;
  for (auto c : record.counts) {
    const double d = static_cast<double>(c) - mean;
    sum += d * d;
  }
  const double variance = static_cast<double>(sum / (record.counts.size() - 1));
  return variance / mean;
}

TimeSeries single_pd_series(const GaussianState& state,
                            const LightSource& source,
                            const DetectorParams& detector,
                            std::int64_t n_samples, std::uint64_t seed,
                            int threads) {
  validate(state);
  source.validate();
  detector.validate();
  require_sample_count(n_samples);
  detail::require(displacement_photon_number(state) >= kGaussianRegimePhotons,
                  "single photodiode detection needs a bright carrier "
                  "(|alpha|^2 >= 100)");

  const double angle = amplitude_angle(state);
  const GaussianState detected =
      apply_loss(state, 1.0 - detector.quantum_efficiency);
  const double quantum_sd = std::sqrt(quadrature_variance(detected, angle));
  const double dark_sd = std::sqrt(detector.dark_noise_variance);

  TimeSeries series;
  series.sample_rate = detector.sample_rate;
  series.lo_phase = angle;
  series.samples.resize(static_cast<std::size_t>(n_samples));
  for_each_chunk(series.samples.size(), seed, threads,
                 [&](Engine& engine, std::size_t begin, std::size_t end) {
                   std::normal_distribution<double> normal;
                   for (std::size_t i = begin; i < end; ++i) {
                     const double quantum = quantum_sd * normal(engine);
                     const double dark = dark_sd * normal(engine);
                     series.samples[i] = quantum + dark;
                   }
                 });
  return series;
}

TimeSeries bhd_series(const GaussianState& signal, double lo_phase,
                      double signal_to_lo_power_ratio,
                      const DetectorParams& detector, std::int64_t n_samples,
                      std::uint64_t seed, int threads) {
  validate(signal);
  detector.validate();
  require_sample_count(n_samples);
  detail::require(signal_to_lo_power_ratio >= 0.0 &&
                      signal_to_lo_power_ratio < 0.01,
                  "signal power must be below 1% of the local oscillator power");
  detail::require(detector.visibility > 0.0, "visibility must be > 0");

  const GaussianState detected =
      apply_loss(signal, 1.0 - detector.homodyne_efficiency());
  const double mean = quadrature_mean(detected, lo_phase);
  const double quantum_sd = std::sqrt(quadrature_variance(detected, lo_phase));
  const double dark_sd = std::sqrt(detector.dark_noise_variance);
  const double leak_sd =
      2.0 * detector.balance_asymmetry * std::sqrt(detector.lo_technical_noise);

  TimeSeries series;
  series.sample_rate = detector.sample_rate;
  series.lo_phase = lo_phase;
  series.samples.resize(static_cast<std::size_t>(n_samples));
  for_each_chunk(series.samples.size(), seed, threads,
                 [&](Engine& engine, std::size_t begin, std::size_t end) {
                   std::normal_distribution<double> normal;
                   for (std::size_t i = begin; i < end; ++i) {
                     const double quantum = quantum_sd * normal(engine);
                     const double dark = dark_sd * normal(engine);
                     // Both diodes see the same LO fluctuation; only the
                     // imbalance survives the subtraction.
                     const double leak = leak_sd * normal(engine);
                     series.samples[i] = mean + quantum + dark + leak;
                   }
                 });
  return series;
}

TimeSeries add_signal_modulation(const TimeSeries& series, double frequency,
                                 double depth) {
  detail::require(frequency >= 0.0 && frequency < series.sample_rate / 2.0,
                  "modulation frequency must lie below the Nyquist frequency");
  TimeSeries out = series;
  if (depth == 0.0) return out;
  const double step = 2.0 * std::numbers::pi * frequency / series.sample_rate;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] += depth * std::sin(step * static_cast<double>(i));
  }
  return out;
}

}  // namespace squeezelab

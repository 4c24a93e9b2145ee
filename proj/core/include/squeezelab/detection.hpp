#pragma once

#include <cstdint>
#include <vector>

#include "squeezelab/gaussian_state.hpp"

namespace squeezelab {

struct LightSource {
  double wavelength = 1064e-9;   // m
  double power = 1e-3;           // W
  double coherence_time = 1e-3;  // s

  void validate() const;
};

enum class WindowShape { kRectangular, kGaussian };

struct MeasurementWindowing {
  double window = 1e-6;  // s
  WindowShape shape = WindowShape::kGaussian;
  std::int64_t n_windows = 1000;

  void validate() const;
};

// Photon counts of an ensemble of short, independent measurement modes.
struct PhotonRecord {
  MeasurementWindowing windowing;
  std::vector<std::int64_t> counts;
  double mean_photons = 0.0;  // expected photons per window
  std::uint64_t seed = 0;

  double sample_mean() const;
};

struct DetectorParams {
  double quantum_efficiency = 1.0;
  double dark_noise_variance = 0.0;  // relative to shot noise
  double visibility = 1.0;           // homodyne mode overlap
  double balance_asymmetry = 0.0;    // deviation of the splitter from 50/50
  // Classical intensity noise on the local oscillator, relative to its shot
  // noise. Leaks into the difference signal as (2 * asymmetry)^2 * noise.
  double lo_technical_noise = 0.0;
  double sample_rate = 1e6;  // Hz

  void validate() const;
  // Quantum efficiency times the mode-overlap penalty V^2.
  double homodyne_efficiency() const;
};

struct TimeSeries {
  double sample_rate = 1.0;  // Hz
  std::vector<double> samples;
  double lo_phase = 0.0;  // quadrature angle that was measured

  double mean() const;
  double variance() const;
};

// Mean photon number P * dT / (h c / lambda) of one window of `source`.
double photons_per_window(const LightSource& source,
                          const MeasurementWindowing& windowing);

// Counts for an ensemble of windows of `state`, which describes one window.
// Coherent states give Poisson counts; amplitude-squeezed bright states are
// sampled as Gaussian with variance V_amplitude * N and rounded.
PhotonRecord sample_photon_record(const GaussianState& state,
                                  const LightSource& source,
                                  const MeasurementWindowing& windowing,
                                  std::uint64_t seed, int threads = 1);

// Sample variance over sample mean. < 1 certifies sub-Poissonian counting.
double fano_factor(const PhotonRecord& record);

// Direct detection of a bright beam: only the amplitude quadrature (the
// direction of the carrier) is observable.
TimeSeries single_pd_series(const GaussianState& state,
                            const LightSource& source,
                            const DetectorParams& detector,
                            std::int64_t n_samples, std::uint64_t seed,
                            int threads = 1);

// Balanced homodyne detection of `signal` at local-oscillator phase
// `lo_phase`. Samples are in shot-noise units.
TimeSeries bhd_series(const GaussianState& signal, double lo_phase,
                      double signal_to_lo_power_ratio,
                      const DetectorParams& detector, std::int64_t n_samples,
                      std::uint64_t seed, int threads = 1);

// Adds depth * sin(2 pi f t).
TimeSeries add_signal_modulation(const TimeSeries& series, double frequency,
                                 double depth);

}  // namespace squeezelab

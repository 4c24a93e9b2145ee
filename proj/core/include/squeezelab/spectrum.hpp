#pragma once

#include <cstddef>
#include <vector>

#include "squeezelab/detection.hpp"

namespace squeezelab {

struct NoiseSpectrum {
  std::vector<double> frequencies;  // Hz, strictly increasing
  std::vector<double> psd;          // relative to shot noise
  double resolution_bandwidth = 0.0;
  std::size_t averages = 0;
};

// Averaged periodogram with a periodic Hann window and 50% overlap. The
// segment length is sample_rate / resolution_bandwidth rounded to the nearest
// integer. Bins are scaled so a white unit-variance series reads 1.0
// everywhere, which makes the mean over bins equal the series variance.
NoiseSpectrum welch_psd(const TimeSeries& series, double resolution_bandwidth);

// Bin-wise ratio to a calibration spectrum taken with the same settings.
NoiseSpectrum relative_to(const NoiseSpectrum& spectrum,
                          const NoiseSpectrum& calibration);

std::size_t nearest_bin(const NoiseSpectrum& spectrum, double frequency);

// Mean of the bins outside +/- `guard` bins of `exclude_bin`, skipping DC.
double noise_floor(const NoiseSpectrum& spectrum, std::size_t exclude_bin,
                   std::size_t guard = 3);

// (P_signal_bin - floor) / floor for a line at `frequency`.
double signal_to_noise(const NoiseSpectrum& spectrum, double frequency);

}  // namespace squeezelab

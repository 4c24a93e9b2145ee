#include "squeezelab/spectrum.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "squeezelab/errors.hpp"

namespace squeezelab {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)) {
    if (in_ == nullptr || out_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t k) const {
    return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace

NoiseSpectrum welch_psd(const TimeSeries& series, double resolution_bandwidth) {
  const std::size_t n = series.samples.size();
  detail::require(series.sample_rate > 0.0, "sample rate must be > 0");
  detail::require(n >= 2, "PSD estimation needs at least 2 samples");
  detail::require(resolution_bandwidth > 0.0 &&
                      resolution_bandwidth >= series.sample_rate / n,
                  "resolution bandwidth must be >= sample_rate / n_samples");

  const auto segment =
      static_cast<std::size_t>(std::llround(series.sample_rate / resolution_bandwidth));
  detail::require(segment >= 2 && segment <= n,
                  "resolution bandwidth gives a segment longer than the series");
  const std::size_t hop = std::max<std::size_t>(segment / 2, 1);
  const std::size_t averages = (n - segment) / hop + 1;

  std::vector<double> window(segment);
  double window_power = 0.0;
  for (std::size_t i = 0; i < segment; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / segment);
    window_power += window[i] * window[i];
  }

  const std::size_t bins = segment / 2 + 1;
  std::vector<double> accumulated(bins, 0.0);
  RealFft fft(segment);
  for (std::size_t a = 0; a < averages; ++a) {
    const double* source = series.samples.data() + a * hop;
    double* in = fft.input();
    for (std::size_t i = 0; i < segment; ++i) in[i] = source[i] * window[i];
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) accumulated[k] += fft.power(k);
  }

  NoiseSpectrum spectrum;
  spectrum.resolution_bandwidth = series.sample_rate / segment;
  spectrum.averages = averages;
  spectrum.frequencies.resize(bins);
  spectrum.psd.resize(bins);
  const double scale = 1.0 / (window_power * static_cast<double>(averages));
  for (std::size_t k = 0; k < bins; ++k) {
    spectrum.frequencies[k] = k * spectrum.resolution_bandwidth;
    spectrum.psd[k] = accumulated[k] * scale;
  }
  return spectrum;
}

NoiseSpectrum relative_to(const NoiseSpectrum& spectrum,
                          const NoiseSpectrum& calibration) {
  detail::require(spectrum.frequencies == calibration.frequencies,
                  "calibration spectrum must share the frequency grid");
  NoiseSpectrum out = spectrum;
  for (std::size_t k = 0; k < out.psd.size(); ++k) {
    detail::require(calibration.psd[k] > 0.0, "calibration bin is empty");
    out.psd[k] /= calibration.psd[k];
  }
  return out;
}

std::size_t nearest_bin(const NoiseSpectrum& spectrum, double frequency) {
  detail::require(!spectrum.frequencies.empty(), "spectrum is empty");
  const double rbw = spectrum.resolution_bandwidth;
  const auto k = static_cast<long long>(std::llround(frequency / rbw));
  return static_cast<std::size_t>(
      std::clamp<long long>(k, 0, static_cast<long long>(spectrum.psd.size()) - 1));
}

double noise_floor(const NoiseSpectrum& spectrum, std::size_t exclude_bin,
                   std::size_t guard) {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 1; k < spectrum.psd.size(); ++k) {
    const std::size_t distance =
        k > exclude_bin ? k - exclude_bin : exclude_bin - k;
    if (distance <= guard) continue;
    sum += spectrum.psd[k];
    ++used;
  }
  detail::require(used > 0, "no bins left to estimate the noise floor");
  return sum / static_cast<double>(used);
}

double signal_to_noise(const NoiseSpectrum& spectrum, double frequency) {
  const std::size_t bin = nearest_bin(spectrum, frequency);
  const double floor = noise_floor(spectrum, bin);
  return (spectrum.psd[bin] - floor) / floor;
}

}  // namespace squeezelab

#pragma once

#include <span>
#include <vector>

#include "squeezelab/gaussian_state.hpp"

namespace squeezelab {

// Degenerate parametric down-conversion in a single-ended cavity operated
// below threshold.
struct OpoParams {
  double pump_ratio = 0.0;         // sqrt(P / P_threshold), in [0, 1)
  double escape_efficiency = 1.0;  // in [0, 1]
  double half_linewidth = 1.0;     // Hz, > 0

  void validate() const;
};

struct SqueezeSpectrumPoint {
  double sideband_frequency = 0.0;  // Hz
  double v_squeeze = 1.0;
  double v_antisqueeze = 1.0;
};

// Output quadrature variances at sideband frequency `omega` (Hz):
//   v_squeeze     = 1 - eta * 4x / ((1 + x)^2 + (omega / gamma)^2)
//   v_antisqueeze = 1 + eta * 4x / ((1 - x)^2 + (omega / gamma)^2)
SqueezeSpectrumPoint opo_spectrum(const OpoParams& params, double omega);
std::vector<SqueezeSpectrumPoint> opo_spectrum(const OpoParams& params,
                                               std::span<const double> omegas);

// g = 1 / (1 - x)^2 and its inverse.
double parametric_gain(double pump_ratio);
double pump_ratio_from_gain(double gain);

// Zero-mean state whose covariance has eigenvalues (v_squeeze, v_antisqueeze)
// with the squeezed axis at `theta`.
GaussianState spectrum_to_state(const SqueezeSpectrumPoint& point,
                                double theta);

}  // namespace squeezelab

#include "squeezelab/opo.hpp"

#include <cmath>
#include <string>

#include "squeezelab/errors.hpp"

namespace squeezelab {
namespace {

void require_below_threshold(double x) {
  if (!(std::isfinite(x) && x >= 0.0)) {
    throw ValidationError("pump ratio must be >= 0, got " + std::to_string(x));
  }
  if (!(x < 1.0)) {
    throw ValidationError("pump ratio " + std::to_string(x) +
                          " is at or above oscillation threshold");
  }
}

}  // namespace

void OpoParams::validate() const {
  require_below_threshold(pump_ratio);
  detail::require_fraction(escape_efficiency, "escape efficiency");
  detail::require(half_linewidth > 0.0, "half linewidth must be > 0 Hz");
}

SqueezeSpectrumPoint opo_spectrum(const OpoParams& params, double omega) {
  params.validate();
  detail::require(omega >= 0.0, "sideband frequency must be >= 0 Hz");
  const double x = params.pump_ratio;
  const double w2 = std::pow(omega / params.half_linewidth, 2);
  const double drive = params.escape_efficiency * 4.0 * x;
  SqueezeSpectrumPoint point;
  point.sideband_frequency = omega;
  point.v_squeeze = 1.0 - drive / ((1.0 + x) * (1.0 + x) + w2);
  point.v_antisqueeze = 1.0 + drive / ((1.0 - x) * (1.0 - x) + w2);
  return point;
}

std::vector<SqueezeSpectrumPoint> opo_spectrum(const OpoParams& params,
                                               std::span<const double> omegas) {
  std::vector<SqueezeSpectrumPoint> out;
  out.reserve(omegas.size());
  for (double omega : omegas) out.push_back(opo_spectrum(params, omega));
  return out;
}

double parametric_gain(double pump_ratio) {
  require_below_threshold(pump_ratio);
  return 1.0 / ((1.0 - pump_ratio) * (1.0 - pump_ratio));
}

double pump_ratio_from_gain(double gain) {
  detail::require(std::isfinite(gain) && gain >= 1.0,
                  "parametric gain must be >= 1, got " + std::to_string(gain));
  return 1.0 - 1.0 / std::sqrt(gain);
}

GaussianState spectrum_to_state(const SqueezeSpectrumPoint& point,
                                double theta) {
  constexpr double kTol = 1e-12;
  detail::require(point.v_squeeze > 0.0, "squeezed variance must be > 0");
  detail::require(point.v_squeeze <= point.v_antisqueeze,
                  "squeezed variance exceeds anti-squeezed variance");
  detail::require(point.v_squeeze * point.v_antisqueeze >= 1.0 - kTol,
                  "variance product below the uncertainty bound");
  GaussianState state;
  state.cov = Eigen::Vector2d(point.v_squeeze, point.v_antisqueeze).asDiagonal();
  return rotate(state, theta);
}

}  // namespace squeezelab

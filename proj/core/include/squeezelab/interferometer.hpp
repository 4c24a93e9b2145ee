#pragma once

#include <optional>
#include <span>
#include <vector>

#include "squeezelab/gaussian_state.hpp"

namespace squeezelab {

// Squeeze angles in the (amplitude, phase) quadrature plane of the field
// entering the dark port. Phase squeezing lowers shot noise; amplitude
// squeezing lowers radiation-pressure noise.
inline constexpr double kShotNoiseSqueezeAngle = 1.5707963267948966;
inline constexpr double kRadiationPressureSqueezeAngle = 0.0;

struct FilterCavityParams {
  double half_linewidth = 1.0;  // Hz, > 0
  double detuning = 0.0;        // Hz
};

struct IfoConfig {
  double arm_power = 1e5;      // W
  double mirror_mass = 40.0;   // kg
  double arm_length = 4e3;     // m
  double wavelength = 1064e-9; // m
  double detection_efficiency = 1.0;
  double injection_loss = 0.0;
  SqueezeSetting injected_squeeze;
  std::optional<FilterCavityParams> filter_cavity;
  // Multiplies every strain PSD; 1 leaves them in 1/Hz.
  double sql_scale = 1.0;

  void validate() const;
};

// Strain-equivalent PSDs (1/Hz) per frequency.
struct BudgetCurve {
  std::vector<double> frequencies;
  std::vector<double> shot;
  std::vector<double> rpn;
  std::vector<double> total;
  std::vector<double> sql;
};

// Optomechanical coupling of a free-mass Michelson,
//   kappa = 4 omega_0 P / (m c^2 Omega^2),  Omega = 2 pi f,
// so shot noise and radiation-pressure noise are equal at kappa = 1.
double kappa(const IfoConfig& cfg, double frequency);

// Frequency (Hz) where kappa = 1.
double sql_crossing_frequency(const IfoConfig& cfg);

// Half the sum of the reflection phases of the upper and lower sidebands of a
// lossless detuned cavity:
//   phi = (atan((detuning + f) / gamma) + atan((detuning - f) / gamma)) / 2.
// The squeeze ellipse of the reflected field is rotated by 2 * phi.
double filter_cavity_angle(const FilterCavityParams& fc, double frequency);

// Single filter cavity that turns phase squeezing into the optimal
// frequency-dependent angle for `cfg`: detuning = linewidth = f_sql / sqrt(2).
FilterCavityParams matched_filter_cavity(const IfoConfig& cfg);

// Covariance of the injected field at `frequency` after the filter cavity and
// the combined injection and detection losses.
GaussianState injected_state(const IfoConfig& cfg, double frequency);

// Per-frequency quantum noise. With readout direction u = (-kappa, 1):
//   shot  = h_sql^2 / 2 * C_pp / kappa
//   rpn   = h_sql^2 / 2 * kappa * C_aa
//   total = h_sql^2 / 2 * (1/kappa + kappa) * u^T C u / |u|^2
//   sql   = h_sql^2 = 8 hbar / (m Omega^2 L^2)
// all multiplied by sql_scale.
BudgetCurve quantum_noise_budget(const IfoConfig& cfg,
                                 std::span<const double> frequencies);

// Laser power factor that gives the same signal-to-shot-noise gain as
// `squeeze_db` of squeezing.
double snr_equivalent_power_gain(double squeeze_db);

// Lumped efficiency the squeezed field sees on reflection from a recycled
// interferometer with the given internal loss.
double recycling_as_loss(double mirror_transmission, double internal_loss);

}  // namespace squeezelab

#include "squeezelab/interferometer.hpp"

#include <cmath>
#include <numbers>

#include "squeezelab/errors.hpp"

namespace squeezelab {
namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kHbar = 1.054571817e-34;

double angular(double frequency) { return 2.0 * std::numbers::pi * frequency; }

// Omega^2 * kappa, independent of frequency.
double coupling_constant(const IfoConfig& cfg) {
  const double omega0 = angular(kSpeedOfLight / cfg.wavelength);
  return 4.0 * omega0 * cfg.arm_power /
         (cfg.mirror_mass * kSpeedOfLight * kSpeedOfLight);
}

}  // namespace

void IfoConfig::validate() const {
  detail::require(arm_power > 0.0, "arm power must be > 0");
  detail::require(mirror_mass > 0.0, "mirror mass must be > 0");
  detail::require(arm_length > 0.0, "arm length must be > 0");
  detail::require(wavelength > 0.0, "wavelength must be > 0");
  detail::require(sql_scale > 0.0, "sql_scale must be > 0");
  detail::require_fraction(detection_efficiency, "detection efficiency");
  detail::require_fraction(injection_loss, "injection loss");
  if (filter_cavity) {
    detail::require(filter_cavity->half_linewidth > 0.0,
                    "filter cavity half linewidth must be > 0");
  }
}

double kappa(const IfoConfig& cfg, double frequency) {
  cfg.validate();
  detail::require(frequency > 0.0, "frequency must be > 0");
  const double omega = angular(frequency);
  return coupling_constant(cfg) / (omega * omega);
}

double sql_crossing_frequency(const IfoConfig& cfg) {
  cfg.validate();
  return std::sqrt(coupling_constant(cfg)) / (2.0 * std::numbers::pi);
}

double filter_cavity_angle(const FilterCavityParams& fc, double frequency) {
  detail::require(fc.half_linewidth > 0.0,
                  "filter cavity half linewidth must be > 0");
  const double g = fc.half_linewidth;
  return 0.5 * (std::atan((fc.detuning + frequency) / g) +
                std::atan((fc.detuning - frequency) / g));
}

FilterCavityParams matched_filter_cavity(const IfoConfig& cfg) {
  const double f = sql_crossing_frequency(cfg) / std::sqrt(2.0);
  return {f, f};
}

GaussianState injected_state(const IfoConfig& cfg, double frequency) {
  GaussianState state = squeeze(vacuum(), cfg.injected_squeeze);
  if (cfg.filter_cavity) {
    state = rotate(state, 2.0 * filter_cavity_angle(*cfg.filter_cavity, frequency));
  }
  const double efficiency =
      (1.0 - cfg.injection_loss) * cfg.detection_efficiency;
  return apply_loss(state, 1.0 - efficiency);
}

BudgetCurve quantum_noise_budget(const IfoConfig& cfg,
                                 std::span<const double> frequencies) {
  cfg.validate();
  detail::require(!frequencies.empty(), "frequency list is empty");

  BudgetCurve curve;
  curve.frequencies.assign(frequencies.begin(), frequencies.end());
  const std::size_t n = frequencies.size();
  curve.shot.resize(n);
  curve.rpn.resize(n);
  curve.total.resize(n);
  curve.sql.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double f = frequencies[i];
    const double k = kappa(cfg, f);
    const double omega = angular(f);
    const double sql = cfg.sql_scale * 8.0 * kHbar /
                       (cfg.mirror_mass * omega * omega * cfg.arm_length *
                        cfg.arm_length);
    const Eigen::Matrix2d& c = injected_state(cfg, f).cov;
    curve.sql[i] = sql;
    curve.shot[i] = 0.5 * sql * c(1, 1) / k;
    curve.rpn[i] = 0.5 * sql * k * c(0, 0);
    const Eigen::Vector2d u(-k, 1.0);
    curve.total[i] = 0.5 * sql * (1.0 / k + k) * u.dot(c * u) / u.squaredNorm();
  }
  return curve;
}

double snr_equivalent_power_gain(double squeeze_db) {
  detail::require(squeeze_db >= 0.0, "squeeze factor must be >= 0 dB");
  return std::pow(10.0, squeeze_db / 10.0);
}

double recycling_as_loss(double mirror_transmission, double internal_loss) {
  detail::require_fraction(mirror_transmission, "mirror transmission");
  detail::require_fraction(internal_loss, "internal loss");
  return 1.0 - internal_loss;
}

}  // namespace squeezelab

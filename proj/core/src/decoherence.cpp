#include "squeezelab/decoherence.hpp"

#include <cmath>
#include <numbers>

#include "squeezelab/errors.hpp"
#include "squeezelab/gaussian_state.hpp"
#include "squeezelab/opo.hpp"

namespace squeezelab {

LossBudget& LossBudget::add(std::string label, double efficiency) {
  detail::require_fraction(efficiency, "efficiency");
  entries_.push_back({std::move(label), efficiency});
  return *this;
}

LossBudget& LossBudget::add_visibility(std::string label, double visibility) {
  detail::require_fraction(visibility, "visibility");
  return add(std::move(label), visibility * visibility);
}

double total_efficiency(const LossBudget& budget) {
  double product = 1.0;
  for (const auto& entry : budget.entries()) product *= entry.efficiency;
  return product;
}

double total_loss(const LossBudget& budget) {
  return 1.0 - total_efficiency(budget);
}

PhaseNoise PhaseNoise::from_degrees(double degrees) {
  detail::require(degrees >= 0.0, "phase noise must be >= 0");
  return PhaseNoise{degrees * std::numbers::pi / 180.0};
}

double PhaseNoise::degrees() const { return sigma * 180.0 / std::numbers::pi; }

QuadraturePair apply_phase_noise(double v_squeeze, double v_antisqueeze,
                                 PhaseNoise noise) {
  detail::require(v_squeeze > 0.0 && v_antisqueeze > 0.0,
                  "variances must be positive");
  detail::require(noise.sigma >= 0.0, "phase noise must be >= 0");
  const double w = 0.5 * (1.0 + std::exp(-2.0 * noise.sigma * noise.sigma));
  return {w * v_squeeze + (1.0 - w) * v_antisqueeze,
          w * v_antisqueeze + (1.0 - w) * v_squeeze};
}

SqueezeDb forward_model(const DecoherenceModel& model, double added_loss) {
  detail::require(model.gain >= 1.0, "parametric gain must be >= 1");
  detail::require_fraction(model.intrinsic_loss, "intrinsic loss");
  detail::require_fraction(added_loss, "added loss");

  const OpoParams opo{pump_ratio_from_gain(model.gain), 1.0, model.gamma};
  const SqueezeSpectrumPoint lossless = opo_spectrum(opo, model.omega);

  const double loss = 1.0 - (1.0 - model.intrinsic_loss) * (1.0 - added_loss);
  const GaussianState state =
      apply_loss(spectrum_to_state(lossless, 0.0), loss);

  const QuadraturePair measured =
      apply_phase_noise(state.cov(0, 0), state.cov(1, 1), model.phase_noise);
  return {db_from_variance(measured.squeeze),
          db_from_variance(measured.antisqueeze)};
}

double effective_improvement(double injected_db, double loss) {
  detail::require(injected_db >= 0.0, "injected squeezing must be >= 0 dB");
  detail::require_fraction(loss, "loss");
  const double v = (1.0 - loss) * variance_from_db(-injected_db) + loss;
  return -db_from_variance(v);
}

double loss_for_improvement(double injected_db, double target_db) {
  detail::require(injected_db > 0.0, "injected squeezing must be > 0 dB");
  detail::require(target_db >= 0.0 && target_db <= injected_db,
                  "target improvement must lie in [0, injected]");
  const double v_in = variance_from_db(-injected_db);
  const double v_out = variance_from_db(-target_db);
  return (v_out - v_in) / (1.0 - v_in);
}

}  // namespace squeezelab

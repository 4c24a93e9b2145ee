#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace squeezelab {

// Ordered chain of efficiencies the squeezed field passes through.
class LossBudget {
 public:
  struct Entry {
    std::string label;
    double efficiency;
  };

  LossBudget() = default;

  LossBudget& add(std::string label, double efficiency);
  // Homodyne fringe visibility V enters as the mode-overlap efficiency V^2.
  LossBudget& add_visibility(std::string label, double visibility);

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

double total_efficiency(const LossBudget& budget);
double total_loss(const LossBudget& budget);

// RMS jitter of the quadrature angle, radians.
struct PhaseNoise {
  double sigma = 0.0;

  static PhaseNoise from_degrees(double degrees);
  double degrees() const;
};

struct QuadraturePair {
  double squeeze = 1.0;
  double antisqueeze = 1.0;
};

// Expectation of the measured variances under zero-mean Gaussian jitter of
// the readout angle: w = E[cos^2] = (1 + exp(-2 sigma^2)) / 2.
QuadraturePair apply_phase_noise(double v_squeeze, double v_antisqueeze,
                                 PhaseNoise noise);

// Squeeze and anti-squeeze levels in dB relative to shot noise.
struct SqueezeDb {
  double squeeze_db = 0.0;
  double antisqueeze_db = 0.0;
};

struct DecoherenceModel {
  double gain = 1.0;            // parametric gain, >= 1
  double intrinsic_loss = 0.0;  // total loss of the setup, fraction
  PhaseNoise phase_noise;
  double omega = 0.0;           // sideband frequency, Hz
  double gamma = 1.0;           // resonator half linewidth, Hz
};

// Lossless resonator output, then loss 1 - (1 - L0)(1 - added_loss), then
// phase-noise averaging.
SqueezeDb forward_model(const DecoherenceModel& model, double added_loss);

// One point of a squeeze/anti-squeeze versus added loss sweep.
struct SqueezeMeasurement {
  double added_loss = 0.0;
  double squeeze_db = 0.0;      // <= 0
  double antisqueeze_db = 0.0;  // >= 0
};

struct FitOptions {
  double gain = 1.0;
  double omega = 0.0;
  double gamma = 1.0;
  // When set, the phase noise is held at this value and only the loss is fit.
  std::optional<PhaseNoise> fixed_phase_noise;

  double loss_max = 0.5;
  double sigma_max_degrees = 5.0;
  int loss_grid_points = 101;
  int sigma_grid_points = 51;
  double loss_tolerance = 1e-9;
  double sigma_tolerance_degrees = 1e-7;
  int max_iterations = 5000;
  // Worker threads for the grid stage; the result does not depend on it.
  int threads = 1;
};

struct FitResult {
  double intrinsic_loss = 0.0;
  PhaseNoise phase_noise;
  double residual = 0.0;  // sum of squared dB errors
  bool converged = false;
  int iterations = 0;
};

// Least-squares fit of (intrinsic loss, phase noise) in dB space: coarse grid
// followed by Nelder-Mead refinement. Deterministic for a given input.
FitResult fit_loss_phase(std::span<const SqueezeMeasurement> data,
                         const FitOptions& options);

// Residual squeezing in dB (magnitude) after `loss`, for an injected level of
// `injected_db` (magnitude).
double effective_improvement(double injected_db, double loss);
// Loss that reduces `injected_db` to `target_db`.
double loss_for_improvement(double injected_db, double target_db);

}  // namespace squeezelab

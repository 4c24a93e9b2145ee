#pragma once

#include <Eigen/Core>

namespace squeezelab {

// Single-mode Gaussian state in shot-noise units: each quadrature of the
// vacuum has unit variance, so variances read directly relative to shot noise.
//
// The displacement convention is mean = 2 * (Re alpha, Im alpha), which makes
// the coherent-state photon number exactly |alpha|^2.
struct GaussianState {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

// Squeeze parameter r >= 0 and the angle of the squeezed axis in phase space.
// The angle is stored reduced to [0, pi) since the noise ellipse is
// pi-periodic.
class SqueezeSetting {
 public:
  SqueezeSetting() = default;
  SqueezeSetting(double r, double theta);

  static SqueezeSetting from_db(double squeeze_db, double theta);

  double r() const { return r_; }
  double theta() const { return theta_; }
  // Variance of the squeezed quadrature of a pure squeezed vacuum, e^{-2r}.
  double squeezed_variance() const;

 private:
  double r_ = 0.0;
  double theta_ = 0.0;
};

GaussianState vacuum();
GaussianState coherent(double alpha_x, double alpha_y);

GaussianState displace(const GaussianState& state, double alpha_x,
                       double alpha_y);
GaussianState squeeze(const GaussianState& state, const SqueezeSetting& s);
GaussianState rotate(const GaussianState& state, double phi);

// Pure-loss channel with loss fraction `loss`: mixes in (loss) of vacuum.
GaussianState apply_loss(const GaussianState& state, double loss);

double quadrature_variance(const GaussianState& state, double theta);
double quadrature_mean(const GaussianState& state, double theta);

// Eigenvalues of the covariance, ascending.
Eigen::Vector2d covariance_eigenvalues(const GaussianState& state);

// |alpha|^2 plus the photons carried by squeezing or thermal noise.
double mean_photon_number(const GaussianState& state);
// |alpha|^2 only.
double displacement_photon_number(const GaussianState& state);

double db_from_variance(double variance);
double variance_from_db(double db);

double purity_determinant(const GaussianState& state);

// Throws ValidationError unless cov is symmetric, positive definite and
// satisfies det(cov) >= 1 (up to a relative tolerance).
void validate(const GaussianState& state);
bool is_physical(const GaussianState& state) noexcept;

}  // namespace squeezelab

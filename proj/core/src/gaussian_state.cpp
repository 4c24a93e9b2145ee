#include "squeezelab/gaussian_state.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "squeezelab/errors.hpp"

namespace squeezelab {
namespace {

constexpr double kPhysicalTolerance = 1e-9;

Eigen::Matrix2d rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

double reduce_angle(double theta) {
  double reduced = std::fmod(theta, std::numbers::pi);
  if (reduced < 0.0) reduced += std::numbers::pi;
  // fmod can round a tiny negative input up to exactly pi.
  if (reduced >= std::numbers::pi) reduced = 0.0;
  return reduced;
}

Eigen::Matrix2d symmetrized(const Eigen::Matrix2d& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

SqueezeSetting::SqueezeSetting(double r, double theta)
    : r_(r), theta_(reduce_angle(theta)) {
  detail::require(std::isfinite(r) && r >= 0.0,
                  "squeeze parameter r must be >= 0, got " + std::to_string(r));
  detail::require(std::isfinite(theta), "squeeze angle must be finite");
}

SqueezeSetting SqueezeSetting::from_db(double squeeze_db, double theta) {
  detail::require(squeeze_db >= 0.0,
                  "squeeze factor in dB must be a non-negative magnitude");
  // 10 dB means variance 0.1 = e^{-2r}.
  return SqueezeSetting(squeeze_db * std::log(10.0) / 20.0, theta);
}

double SqueezeSetting::squeezed_variance() const { return std::exp(-2.0 * r_); }

GaussianState vacuum() { return GaussianState{}; }

GaussianState coherent(double alpha_x, double alpha_y) {
  return displace(vacuum(), alpha_x, alpha_y);
}

GaussianState displace(const GaussianState& state, double alpha_x,
                       double alpha_y) {
  GaussianState out = state;
  out.mean += 2.0 * Eigen::Vector2d(alpha_x, alpha_y);
  return out;
}

GaussianState squeeze(const GaussianState& state, const SqueezeSetting& s) {
  validate(state);
  if (s.r() == 0.0) return state;
  const Eigen::Matrix2d rot = rotation(s.theta());
  const Eigen::Matrix2d diag =
      Eigen::Vector2d(std::exp(-s.r()), std::exp(s.r())).asDiagonal();
  const Eigen::Matrix2d sym = rot * diag * rot.transpose();
  GaussianState out;
  out.mean = sym * state.mean;
  out.cov = symmetrized(sym * state.cov * sym.transpose());
  return out;
}

GaussianState rotate(const GaussianState& state, double phi) {
  const Eigen::Matrix2d rot = rotation(phi);
  GaussianState out;
  out.mean = rot * state.mean;
  out.cov = symmetrized(rot * state.cov * rot.transpose());
  return out;
}

GaussianState apply_loss(const GaussianState& state, double loss) {
  detail::require_fraction(loss, "loss");
  const double transmission = 1.0 - loss;
  GaussianState out;
  out.mean = std::sqrt(transmission) * state.mean;
  out.cov = transmission * state.cov + loss * Eigen::Matrix2d::Identity();
  return out;
}

double quadrature_variance(const GaussianState& state, double theta) {
  const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
  return u.dot(state.cov * u);
}

double quadrature_mean(const GaussianState& state, double theta) {
  return std::cos(theta) * state.mean.x() + std::sin(theta) * state.mean.y();
}

Eigen::Vector2d covariance_eigenvalues(const GaussianState& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(state.cov,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double displacement_photon_number(const GaussianState& state) {
  return state.mean.squaredNorm() / 4.0;
}

double mean_photon_number(const GaussianState& state) {
  return displacement_photon_number(state) + (state.cov.trace() - 2.0) / 4.0;
}

double db_from_variance(double variance) {
  detail::require(variance > 0.0, "variance must be positive to convert to dB");
  return 10.0 * std::log10(variance);
}

double variance_from_db(double db) { return std::pow(10.0, db / 10.0); }

double purity_determinant(const GaussianState& state) {
  // Kahan's compensated a*d - b*c; the plain form cancels badly for strongly
  // squeezed states.
  const Eigen::Matrix2d& c = state.cov;
  const double bc = c(0, 1) * c(1, 0);
  const double err = std::fma(-c(0, 1), c(1, 0), bc);
  const double det = std::fma(c(0, 0), c(1, 1), -bc);
  return det + err;
}

bool is_physical(const GaussianState& state) noexcept {
  const Eigen::Matrix2d& c = state.cov;
  if (!c.allFinite() || !state.mean.allFinite()) return false;
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (std::abs(c(0, 1) - c(1, 0)) > kPhysicalTolerance * scale) return false;
  if (c(0, 0) <= 0.0 || c(1, 1) <= 0.0) return false;
  return purity_determinant(state) >= 1.0 - kPhysicalTolerance * scale * scale;
}

void validate(const GaussianState& state) {
  if (!is_physical(state)) {
    throw ValidationError(
        "covariance must be symmetric positive definite with det(cov) >= 1");
  }
}

}  // namespace squeezelab

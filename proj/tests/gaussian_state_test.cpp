#include "squeezelab/gaussian_state.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "squeezelab/errors.hpp"

using namespace squeezelab;

namespace {

const double kTenDbR = std::log(10.0) / 2.0;

GaussianState ten_db_x_squeezed() {
  return squeeze(vacuum(), SqueezeSetting(kTenDbR, 0.0));
}

GaussianState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GaussianState s = coherent(4 * u(rng) - 2, 4 * u(rng) - 2);
  s = squeeze(s, SqueezeSetting(kTenDbR * u(rng), std::numbers::pi * u(rng)));
  return apply_loss(s, 0.8 * u(rng));
}

}  // namespace

TEST(GaussianState, VacuumIsIdentity) {
  const GaussianState v = vacuum();
  EXPECT_EQ(v.mean, Eigen::Vector2d::Zero());
  EXPECT_EQ(v.cov, Eigen::Matrix2d::Identity());
  EXPECT_DOUBLE_EQ(purity_determinant(v), 1.0);
  for (double theta : {0.0, 0.3, 1.0, 2.5}) {
    EXPECT_DOUBLE_EQ(quadrature_variance(v, theta), 1.0);
  }
}

TEST(GaussianState, CoherentPhotonNumber) {
  EXPECT_EQ(coherent(0, 0).mean, vacuum().mean);
  EXPECT_NEAR(mean_photon_number(coherent(6.0, 8.0)), 100.0, 1e-12);
  EXPECT_NEAR(mean_photon_number(coherent(5.0, 0.0)), 25.0, 1e-12);
  const GaussianState c = coherent(3.0, -1.0);
  for (double theta : {0.0, 0.7, 1.9}) {
    EXPECT_NEAR(quadrature_variance(c, theta), 1.0, 1e-15);
  }
}

TEST(GaussianState, SqueezeTenDb) {
  const GaussianState s = ten_db_x_squeezed();
  EXPECT_NEAR(s.cov(0, 0), 0.1, 1e-12);
  EXPECT_NEAR(s.cov(1, 1), 10.0, 1e-12);
  EXPECT_NEAR(s.cov(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(quadrature_variance(s, std::numbers::pi / 4), 5.05, 1e-12);
  EXPECT_NEAR(mean_photon_number(s), 2.025, 1e-12);
  EXPECT_NEAR(mean_photon_number(s), std::pow(std::sinh(kTenDbR), 2), 1e-12);
}

TEST(GaussianState, SqueezeHalvesNoisePower) {
  const GaussianState s =
      squeeze(vacuum(), SqueezeSetting(std::log(2.0) / 2.0, 0.0));
  EXPECT_NEAR(s.cov(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(db_from_variance(s.cov(0, 0)), -3.0103, 1e-4);
}

TEST(GaussianState, SqueezeZeroIsIdentity) {
  std::mt19937_64 rng(3);
  const GaussianState s = random_state(rng);
  const GaussianState t = squeeze(s, SqueezeSetting(0.0, 1.2));
  EXPECT_EQ(s.cov, t.cov);
  EXPECT_EQ(s.mean, t.mean);
}

TEST(GaussianState, SqueezeRejectsNegativeR) {
  EXPECT_THROW(SqueezeSetting(-0.1, 0.0), ValidationError);
}

TEST(GaussianState, AngleReducedModPi) {
  EXPECT_NEAR(SqueezeSetting(0.5, std::numbers::pi + 0.25).theta(), 0.25, 1e-12);
  EXPECT_NEAR(SqueezeSetting(0.5, -0.25).theta(), std::numbers::pi - 0.25, 1e-12);
  EXPECT_GE(SqueezeSetting(0.5, -1e-300).theta(), 0.0);
  EXPECT_LT(SqueezeSetting(0.5, -1e-300).theta(), std::numbers::pi);
}

TEST(GaussianState, RotateSwapsAxes) {
  const GaussianState s = ten_db_x_squeezed();
  const GaussianState r = rotate(s, std::numbers::pi / 2);
  EXPECT_NEAR(r.cov(0, 0), 10.0, 1e-12);
  EXPECT_NEAR(r.cov(1, 1), 0.1, 1e-12);
  const GaussianState half_turn = rotate(s, std::numbers::pi);
  EXPECT_TRUE(half_turn.cov.isApprox(s.cov, 1e-12));
  EXPECT_EQ(rotate(s, 0.0).cov, s.cov);
}

TEST(GaussianState, LossExamples) {
  const GaussianState s = ten_db_x_squeezed();
  EXPECT_EQ(apply_loss(s, 0.0).cov, s.cov);
  EXPECT_TRUE(apply_loss(s, 1.0).cov.isApprox(Eigen::Matrix2d::Identity()));
  const GaussianState l = apply_loss(s, 0.385);
  EXPECT_NEAR(l.cov(0, 0), 0.4465, 1e-12);
  EXPECT_NEAR(l.cov(1, 1), 6.535, 1e-12);
  EXPECT_NEAR(db_from_variance(l.cov(0, 0)), -3.50, 0.005);
  EXPECT_THROW(apply_loss(s, -0.01), ValidationError);
  EXPECT_THROW(apply_loss(s, 1.01), ValidationError);
}

TEST(GaussianState, DbConversions) {
  EXPECT_DOUBLE_EQ(db_from_variance(1.0), 0.0);
  EXPECT_NEAR(db_from_variance(0.5), -3.0103, 1e-4);
  EXPECT_NEAR(db_from_variance(0.1), -10.0, 1e-12);
  EXPECT_THROW(db_from_variance(0.0), ValidationError);
  EXPECT_THROW(db_from_variance(-1.0), ValidationError);
}

TEST(GaussianState, ValidateRejectsUnphysical) {
  GaussianState s;
  s.cov = Eigen::Vector2d(0.5, 0.5).asDiagonal();
  EXPECT_FALSE(is_physical(s));
  EXPECT_THROW(validate(s), ValidationError);
  EXPECT_THROW(squeeze(s, SqueezeSetting(0.1, 0.0)), ValidationError);
}

// Property suite over random states.
TEST(GaussianStateProperty, SymplecticOpsPreserveDeterminant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const GaussianState s = random_state(rng);
    const double det = purity_determinant(s);
    const GaussianState sq =
        squeeze(s, SqueezeSetting(kTenDbR * u(rng), 4.0 * u(rng)));
    const GaussianState ro = rotate(s, 10.0 * u(rng) - 5.0);
    EXPECT_NEAR(purity_determinant(sq) / det, 1.0, 1e-12);
    EXPECT_NEAR(purity_determinant(ro) / det, 1.0, 1e-12);
    const Eigen::Vector2d e0 = covariance_eigenvalues(s);
    const Eigen::Vector2d e1 = covariance_eigenvalues(ro);
    EXPECT_NEAR(e0(0), e1(0), 1e-12 * e0(1));
    EXPECT_NEAR(e0(1), e1(1), 1e-12 * e0(1));
  }
}

TEST(GaussianStateProperty, LossComposition) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const GaussianState s = random_state(rng);
    const double l1 = u(rng), l2 = u(rng);
    const GaussianState twice = apply_loss(apply_loss(s, l1), l2);
    const GaussianState once = apply_loss(s, 1.0 - (1.0 - l1) * (1.0 - l2));
    EXPECT_LT((twice.cov - once.cov).cwiseAbs().maxCoeff(),
              1e-12 * std::max(1.0, s.cov.cwiseAbs().maxCoeff()));
    EXPECT_LT((twice.mean - once.mean).cwiseAbs().maxCoeff(),
              1e-12 * std::max(1.0, s.mean.cwiseAbs().maxCoeff()));
    EXPECT_GE(purity_determinant(once), 1.0 - 1e-12);
  }
}

TEST(GaussianStateProperty, MinimumQuadratureIsSmallerEigenvalue) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianState s = random_state(rng);
    // Brute-force scan, then polish the best cell by golden section.
    double best = 1e300, best_theta = 0.0;
    constexpr int kAngles = 1000;
    for (int i = 0; i < kAngles; ++i) {
      const double theta = std::numbers::pi * i / kAngles;
      const double v = quadrature_variance(s, theta);
      if (v < best) best = v, best_theta = theta;
    }
    double a = best_theta - std::numbers::pi / kAngles;
    double b = best_theta + std::numbers::pi / kAngles;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (quadrature_variance(s, c) < quadrature_variance(s, d)) b = d; else a = c;
    }
    const double polished = std::min(best, quadrature_variance(s, 0.5 * (a + b)));
    EXPECT_NEAR(polished, covariance_eigenvalues(s)(0), 1e-9);
    EXPECT_GE(best, covariance_eigenvalues(s)(0) - 1e-12);
  }
}

TEST(GaussianStateProperty, DbRoundTrip) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double d = u(rng);
    EXPECT_NEAR(db_from_variance(variance_from_db(d)), d, 1e-12);
  }
}

#include "squeezelab/decoherence.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "squeezelab/errors.hpp"
#include "squeezelab/gaussian_state.hpp"

using namespace squeezelab;

TEST(LossBudget, TotalEfficiency) {
  EXPECT_DOUBLE_EQ(total_efficiency(LossBudget{}), 1.0);
  LossBudget b;
  b.add("photodiode", 0.995).add_visibility("contrast", 0.99).add("optics", 0.98);
  EXPECT_NEAR(total_efficiency(b), 0.995 * 0.9801 * 0.98, 1e-15);
  EXPECT_NEAR(total_efficiency(b), 0.955696, 1e-6);
  EXPECT_EQ(b.entries().size(), 3u);
  EXPECT_DOUBLE_EQ(b.entries()[1].efficiency, 0.9801);

  LossBudget single;
  single.add("total", 0.914);
  EXPECT_DOUBLE_EQ(total_efficiency(single), 0.914);
  EXPECT_NEAR(total_loss(single), 0.086, 1e-15);
  EXPECT_THROW(single.add("bad", 1.5), ValidationError);
}

TEST(PhaseNoise, Identity) {
  const auto p = apply_phase_noise(0.09, 200.0, PhaseNoise{0.0});
  EXPECT_DOUBLE_EQ(p.squeeze, 0.09);
  EXPECT_DOUBLE_EQ(p.antisqueeze, 200.0);
  const auto vac = apply_phase_noise(1.0, 1.0, PhaseNoise::from_degrees(10.0));
  EXPECT_DOUBLE_EQ(vac.squeeze, 1.0);
  EXPECT_DOUBLE_EQ(vac.antisqueeze, 1.0);
}

TEST(PhaseNoise, MatchesMonteCarloJitter) {
  const double sigma = oracle::deg(1.2);
  const auto closed = apply_phase_noise(0.09013, 202.3, PhaseNoise{sigma});
  EXPECT_NEAR(closed.squeeze, 0.17876, 1e-4);
  EXPECT_NEAR(db_from_variance(closed.squeeze), -7.48, 0.005);
  const auto mc = oracle::jitter_monte_carlo(0.09013, 202.3, sigma, 1'000'000, 5);
  // MC standard error of the cos^2 average is ~ va * 2 sigma^2 / sqrt(N).
  EXPECT_NEAR(closed.squeeze, mc.s, 5e-4);
  EXPECT_NEAR(closed.antisqueeze, mc.a, 5e-4);
}

TEST(PhaseNoiseProperty, TraceAndMonotonicity) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double vs = 0.05 + 0.9 * u(rng);
    const double va = 1.0 / vs + 50.0 * u(rng);
    double last_s = vs;
    for (int k = 1; k <= 30; ++k) {
      const auto p = apply_phase_noise(vs, va, PhaseNoise{0.05 * k});
      EXPECT_NEAR(p.squeeze + p.antisqueeze, vs + va, 1e-12 * (vs + va));
      EXPECT_GT(p.squeeze * p.antisqueeze, vs * va);
      EXPECT_GT(p.squeeze, last_s);
      EXPECT_LE(p.squeeze, 0.5 * (vs + va) + 1e-12);
      last_s = p.squeeze;
    }
  }
}

TEST(ForwardModel, FigureParameterSets) {
  DecoherenceModel m{63.0, 0.086, PhaseNoise{0.0}, 0.0, 1e7};
  const SqueezeDb loss_only = forward_model(m, 0.0);
  const auto oracle_loss = oracle::degraded_db(63.0, 0.086, 0.0);
  EXPECT_NEAR(loss_only.squeeze_db, oracle_loss.s, 1e-10);
  EXPECT_NEAR(loss_only.antisqueeze_db, oracle_loss.a, 1e-10);
  EXPECT_NEAR(loss_only.squeeze_db, -10.45, 0.005);
  EXPECT_NEAR(loss_only.antisqueeze_db, 23.06, 0.005);

  m.intrinsic_loss = 0.056;
  m.phase_noise = PhaseNoise::from_degrees(1.2);
  const SqueezeDb with_jitter = forward_model(m, 0.0);
  EXPECT_NEAR(with_jitter.squeeze_db, -8.19, 0.005);
  const auto oracle_jitter = oracle::degraded_db(63.0, 0.056, oracle::deg(1.2));
  EXPECT_NEAR(with_jitter.squeeze_db, oracle_jitter.s, 1e-10);
  EXPECT_NEAR(with_jitter.antisqueeze_db, oracle_jitter.a, 1e-10);
  EXPECT_NEAR(with_jitter.antisqueeze_db, 23.198, 0.001);

  const SqueezeDb dark = forward_model(m, 1.0);
  EXPECT_NEAR(dark.squeeze_db, 0.0, 1e-12);
  EXPECT_NEAR(dark.antisqueeze_db, 0.0, 1e-12);
}

TEST(ForwardModel, SidebandFrequencyUsesLinewidth) {
  DecoherenceModel m{63.0, 0.1, PhaseNoise{0.0}, 2e6, 4e6};
  const SqueezeDb got = forward_model(m, 0.2);
  const auto want = oracle::degraded_db(63.0, 1 - 0.9 * 0.8, 0.0, 0.5);
  EXPECT_NEAR(got.squeeze_db, want.s, 1e-10);
  EXPECT_NEAR(got.antisqueeze_db, want.a, 1e-10);
}

TEST(ForwardModelProperty, MonotoneInAddedLoss) {
  DecoherenceModel m{63.0, 0.06, PhaseNoise::from_degrees(1.0), 0.0, 1.0};
  SqueezeDb last = forward_model(m, 0.0);
  for (int i = 1; i <= 100; ++i) {
    const SqueezeDb cur = forward_model(m, i / 100.0);
    EXPECT_GE(cur.squeeze_db, last.squeeze_db);
    EXPECT_LE(cur.antisqueeze_db, last.antisqueeze_db);
    last = cur;
  }
}

TEST(EffectiveImprovement, ObservatoryChain) {
  EXPECT_NEAR(effective_improvement(10.0, 0.3852), 3.50, 0.001);
  EXPECT_NEAR(loss_for_improvement(10.0, 6.0), 0.16799, 1e-5);
  EXPECT_NEAR(effective_improvement(10.0, loss_for_improvement(10.0, 6.0)), 6.0,
              1e-12);
  EXPECT_NEAR(effective_improvement(7.3, 0.0), 7.3, 1e-12);
  EXPECT_NEAR(effective_improvement(7.3, 1.0), 0.0, 1e-12);
  double last = 10.0 + 1e-9;
  for (int i = 0; i <= 100; ++i) {
    const double v = effective_improvement(10.0, i / 100.0);
    EXPECT_LT(v, last);
    last = v;
  }
  EXPECT_THROW(effective_improvement(-1.0, 0.1), ValidationError);
  EXPECT_THROW(effective_improvement(10.0, 1.1), ValidationError);
}

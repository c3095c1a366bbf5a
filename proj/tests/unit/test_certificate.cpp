#include <cmath>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "omas/certificate.hpp"
#include "omas/errors.hpp"

using namespace omas;

namespace {

std::vector<ModeCertificate> fixture_certs(const GammaPolicy& policy = {}) {
  std::vector<ModeCertificate> out;
  for (const auto& m : fixture::modes()) {
    const ModeMatrix mm = build_mode_matrix(fixture::dynamics(), m, fixture::kRho);
    out.push_back(solve_mode_certificate(mm, policy.margin_for(mm.mode_id, mm.alpha), policy.clamp_theta));
  }
  return out;
}

}  // namespace

TEST(Certificate, ResidualAndDefiniteness) {
  for (const auto& c : fixture_certs()) {
    EXPECT_GT(c.lambda_min, 0.0);
    EXPECT_LE(c.residual, 1e-8 * c.lambda_max);
    EXPECT_NEAR(c.residual, -1.0, 1e-8);
  }
}

TEST(Certificate, DefaultMarginAndStableClamp) {
  GammaPolicy policy;
  EXPECT_DOUBLE_EQ(policy.margin_for(1, -2.925), 0.05 * 3.925);
  policy.per_mode[1] = 5.0;  // would push gamma above zero
  const ModeMatrix mm = build_mode_matrix(fixture::dynamics(), fixture::modes()[0], fixture::kRho);
  const ModeCertificate c = solve_mode_certificate(mm, policy.margin_for(1, mm.alpha), policy.clamp_theta);
  EXPECT_NEAR(c.gamma, -2.925 * 0.9, 1e-9);
}

TEST(Certificate, AggregatesAndConstants) {
  const auto certs = fixture_certs();
  const GammaAggregates g = gamma_aggregates(certs, {1});
  EXPECT_LT(g.gamma_bar_s, 0.0);
  EXPECT_GT(g.gamma_bar_u, 5.925);
  EXPECT_DOUBLE_EQ(g.gamma_tilde_default, g.gamma_bar_s / 2);
  EXPECT_THROW(gamma_aggregates(certs, {}), AssumptionViolation);

  const ImpulseBounds imp{0.53, 1.0};
  const CertificateBundle b = assemble_constants(certs, imp, 0.2, 0.0, {1});
  EXPECT_NEAR(b.mu, std::sqrt(b.p_over / b.p_under), 1e-12);
  EXPECT_NEAR(b.vartheta_bar, 0.2 * b.p_over / std::sqrt(b.p_under), 1e-12);
  EXPECT_NEAR(b.theta_bar, 0.53 * std::sqrt(b.p_over), 1e-12);
  EXPECT_NEAR(b.c_bar, b.vartheta_bar / -b.gamma_tilde, 1e-12);
  EXPECT_THROW(assemble_constants(certs, imp, 0.2, 0.0, {1}, 0.5), ConfigError);
}

TEST(Certificate, GeometricSumAndBound) {
  EXPECT_DOUBLE_EQ(geometric_sum(1.0, 3.0), 3.0);
  EXPECT_NEAR(geometric_sum(2.0, 3.0), 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(ultimate_bound(0.0, 0.0, 3.0, 1.0, -0.5, 0.1), 0.0);
  // N_hat = 0, mu = 1: sqrt(1/P) (c (1 + 1/(1 - e^s)) + Theta / (1 - e^s))
  const double s = -0.5;
  const double expected = std::sqrt(1 / 0.25) * (2.0 * (1.0 + 1.0 / (1 - std::exp(s))) + 1.0 / (1 - std::exp(s)));
  EXPECT_NEAR(ultimate_bound(2.0, 1.0, 1.0, 0.0, s, 0.25), expected, 1e-12);
}

TEST(Certificate, UnboundedWhenDwellTooShort) {
  const auto certs = fixture_certs();
  const SwitchingSignal sig(0.0, 2.0, {{0.0, 1}, {0.5, 2}, {0.6, 1}, {1.0, 2}, {1.1, 1}});
  EXPECT_THROW(assemble_bundle(certs, {0.53, 1.0}, 0.2, sig, 0.0, {1}), UnboundedCertificate);
  CertificateBundle b = assemble_constants(certs, {0.53, 1.0}, 0.2, 0.0, {1});
  finalize_bound(b, sig);
  EXPECT_FALSE(b.bounded);
  EXPECT_TRUE(std::isinf(b.epsilon));
}

TEST(Certificate, VanishingPerturbationGivesZeroEpsilon) {
  const auto certs = fixture_certs();
  const SwitchingSignal sig(0.0, 2.0, {{0.0, 1}, {0.5, 2}, {0.6, 1}});
  CertificateBundle b = assemble_constants(certs, {0.0, 1.0}, 0.0, 0.0, {1});
  finalize_bound(b, sig);
  EXPECT_EQ(b.epsilon, 0.0);
}

TEST(Certificate, NonHurwitzShiftRejected) {
  const ModeMatrix mm = build_mode_matrix(fixture::dynamics(), fixture::modes()[0], fixture::kRho);
  EXPECT_THROW(solve_mode_certificate(mm, -0.1), CertificateError);
}

TEST(Certificate, DecayAlongUnforcedFlow) {
  for (const auto& m : fixture::modes()) {
    const ModeMatrix mm = build_mode_matrix(fixture::dynamics(), m, fixture::kRho);
    const ModeCertificate c = solve_mode_certificate(mm, 0.05 * (1 + std::abs(mm.alpha)));
    Vector x = Vector::Ones(mm.a_tilde.rows());
    for (int step = 0; step < 50; ++step) {
      const double v = std::sqrt(x.dot(c.p * x));
      const double vdot = x.dot(c.p * (mm.a_tilde * x)) / v;
      EXPECT_LE(vdot, c.gamma * v + 1e-9);
      x += 0.01 * mm.a_tilde * x;
    }
  }
}

TEST(Certificate, EpsilonGrowsWithPerturbationAndImpulse) {
  const auto certs = fixture_certs();
  const SwitchingSignal sig(0.0, 30.0, {{0.0, 1}, {15.0, 2}, {15.01, 1}});
  double prev = -1.0;
  for (double h : {0.0, 0.1, 0.2}) {
    CertificateBundle b = assemble_constants(certs, {0.53, 1.0}, h, 0.0, {1});
    finalize_bound(b, sig);
    ASSERT_TRUE(b.bounded);
    EXPECT_GE(b.epsilon, prev);
    prev = b.epsilon;
  }
  prev = -1.0;
  for (double phi : {0.0, 0.25, 0.53}) {
    CertificateBundle b = assemble_constants(certs, {phi, 1.0}, 0.2, 0.0, {1});
    finalize_bound(b, sig);
    EXPECT_GE(b.epsilon, prev);
    prev = b.epsilon;
  }
}

#include "omas/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "omas/errors.hpp"
#include "omas/lyapunov.hpp"

namespace omas {

double GammaPolicy::margin_for(int mode_id, double alpha) const {
  if (auto it = per_mode.find(mode_id); it != per_mode.end()) return it->second;
  if (fixed) return *fixed;
  return relative * (1.0 + std::abs(alpha));
}

double certificate_residual(const Matrix& a_tilde, const Matrix& p, double gamma) {
  const Matrix r = a_tilde.transpose() * p + p * a_tilde - 2.0 * gamma * p;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

ModeCertificate solve_mode_certificate(const ModeMatrix& mm, double gamma_margin,
                                       double clamp_theta) {
  const std::string ctx = "mode " + std::to_string(mm.mode_id);
  if (!(gamma_margin > 0.0)) {
    throw CertificateError(ctx + ": gamma margin must be positive");
  }
  ModeCertificate c;
  c.mode_id = mm.mode_id;
  c.margin = gamma_margin;
  c.gamma = mm.alpha + gamma_margin;
  if (mm.stable && c.gamma >= 0.0) c.gamma = mm.alpha * (1.0 - clamp_theta);

  const Eigen::Index n = mm.a_tilde.rows();
  const Matrix shifted = mm.a_tilde - c.gamma * Matrix::Identity(n, n);
  if (!(spectral_abscissa(shifted, ctx.c_str()) < 0.0)) {
    throw CertificateError(ctx + ": shifted matrix A - gamma I is not Hurwitz (gamma = " +
                           std::to_string(c.gamma) + ")");
  }
  try {
    c.p = solve_continuous_lyapunov(shifted, -Matrix::Identity(n, n));
  } catch (const NumericError& e) {
    throw NumericError(ctx + ": " + e.what());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(c.p, Eigen::EigenvaluesOnly);
  c.lambda_min = es.eigenvalues().minCoeff();
  c.lambda_max = es.eigenvalues().maxCoeff();
  if (!(c.lambda_min > 0.0)) {
    throw NumericError(ctx + ": Lyapunov solution is not positive definite");
  }
  c.residual = certificate_residual(mm.a_tilde, c.p, c.gamma);
  if (c.residual > 1e-8 * c.lambda_max) {
    throw NumericError(ctx + ": certificate residual " + std::to_string(c.residual) +
                       " exceeds tolerance");
  }
  return c;
}

GammaAggregates gamma_aggregates(const std::vector<ModeCertificate>& certs,
                                 const std::set<int>& stable_set) {
  GammaAggregates g;
  const double ninf = -std::numeric_limits<double>::infinity();
  g.gamma_bar_s = ninf;
  g.gamma_bar_u = ninf;
  for (const auto& c : certs) {
    double& slot = stable_set.count(c.mode_id) ? g.gamma_bar_s : g.gamma_bar_u;
    slot = std::max(slot, c.gamma);
  }
  if (g.gamma_bar_s == ninf) {
    throw AssumptionViolation("no stable mode: the rate aggregates need at least one");
  }
  if (g.gamma_bar_u == ninf) {
    g.no_unstable_modes = true;
    g.gamma_bar_u = 0.0;
  }
  g.gamma_tilde_default = 0.5 * g.gamma_bar_s;
  return g;
}

const ModeCertificate& CertificateBundle::cert(int mode_id) const {
  for (const auto& c : certs) {
    if (c.mode_id == mode_id) return c;
  }
  throw ConfigError("no certificate for mode " + std::to_string(mode_id));
}

SwitchingBudget CertificateBundle::budget() const {
  SwitchingBudget b;
  b.n_hat = n_hat;
  b.gamma_tilde = gamma_tilde;
  b.gamma_bar_s = gamma_bar_s;
  b.gamma_bar_u = gamma_bar_u;
  b.mu = mu;
  return b;
}

double geometric_sum(double mu, double k) {
  if (std::abs(mu - 1.0) < 1e-12) return k;
  return (1.0 - std::pow(mu, k)) / (1.0 - mu);
}

double ultimate_bound(double c_bar, double theta_bar, double mu, double n_hat,
                      double varsigma_bar, double p_under) {
  const double tail = 1.0 / (1.0 - std::exp(varsigma_bar));
  const double flow = c_bar * (geometric_sum(mu, n_hat + 1.0) +
                               std::exp((1.0 + n_hat) * std::log(mu)) * tail);
  const double jump = theta_bar * (geometric_sum(mu, n_hat) +
                                   std::exp(n_hat * std::log(mu)) * tail);
  return std::sqrt(1.0 / p_under) * (flow + jump);
}

CertificateBundle assemble_constants(std::vector<ModeCertificate> certs,
                                     const ImpulseBounds& impulses, double h_bar,
                                     double n_hat, const std::set<int>& stable_set,
                                     std::optional<double> gamma_tilde) {
  if (certs.empty()) throw CertificateError("no mode certificates");
  if (h_bar < 0.0) throw ConfigError("h_bar must be nonnegative");
  if (n_hat < 0.0) throw ConfigError("N_hat must be nonnegative");
  CertificateBundle b;
  const GammaAggregates g = gamma_aggregates(certs, stable_set);
  b.gamma_bar_s = g.gamma_bar_s;
  b.gamma_bar_u = g.gamma_bar_u;
  if (gamma_tilde) {
    if (!(*gamma_tilde > g.gamma_bar_s && *gamma_tilde < 0.0)) {
      throw ConfigError("gamma_tilde = " + std::to_string(*gamma_tilde) +
                        " outside the admissible range (" + std::to_string(g.gamma_bar_s) +
                        ", 0)");
    }
    b.gamma_tilde = *gamma_tilde;
  } else {
    b.gamma_tilde = g.gamma_tilde_default;
  }
  b.p_under = std::numeric_limits<double>::infinity();
  b.p_over = 0.0;
  for (const auto& c : certs) {
    b.p_under = std::min(b.p_under, c.lambda_min);
    b.p_over = std::max(b.p_over, c.lambda_max);
  }
  b.certs = std::move(certs);
  b.h_bar = h_bar;
  b.n_hat = n_hat;
  b.phi_bar = impulses.phi_bar;
  b.xi_breve_norm_max = impulses.xi_breve_norm_max;
  b.mu = std::sqrt(b.p_over / b.p_under) * std::max(1.0, impulses.xi_breve_norm_max);
  b.vartheta_bar = h_bar * b.p_over / std::sqrt(b.p_under);
  b.theta_bar = impulses.phi_bar * std::sqrt(b.p_over);
  b.c_bar = b.vartheta_bar / (-b.gamma_tilde);
  return b;
}

void finalize_bound(CertificateBundle& b, const SwitchingSignal& sig) {
  const double log_mu = std::log(b.mu);
  b.varsigma_bar = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= sig.n_switches(); ++j) {
    const double tau = piecewise_adt(sig, b.n_hat, j);
    if (std::isinf(tau)) continue;
    b.varsigma_bar = std::max(b.varsigma_bar, tau * b.gamma_tilde + log_mu);
  }
  b.finalized = true;
  if (b.vartheta_bar == 0.0 && b.theta_bar == 0.0) {
    b.epsilon = 0.0;
    b.bounded = true;
    return;
  }
  if (b.varsigma_bar >= 0.0) {
    b.epsilon = std::numeric_limits<double>::infinity();
    b.bounded = false;
    return;
  }
  b.epsilon = ultimate_bound(b.c_bar, b.theta_bar, b.mu, b.n_hat, b.varsigma_bar, b.p_under);
  b.bounded = true;
}

CertificateBundle assemble_bundle(std::vector<ModeCertificate> certs,
                                  const ImpulseBounds& impulses, double h_bar,
                                  const SwitchingSignal& sig, double n_hat,
                                  const std::set<int>& stable_set,
                                  std::optional<double> gamma_tilde) {
  CertificateBundle b =
      assemble_constants(std::move(certs), impulses, h_bar, n_hat, stable_set, gamma_tilde);
  finalize_bound(b, sig);
  if (!b.bounded) {
    throw UnboundedCertificate("varsigma_bar = " + std::to_string(b.varsigma_bar) +
                               " >= 0: the dwell-time condition fails on some suffix and "
                               "the ultimate bound diverges");
  }
  return b;
}

}  // namespace omas

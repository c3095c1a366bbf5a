#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "omas/mode_dynamics.hpp"
#include "omas/switching.hpp"
#include "omas/transition.hpp"

namespace omas {

struct ModeCertificate {
  int mode_id = 0;
  double gamma = 0.0;    // decay/growth rate of V = sqrt(e^T P e) along the flow
  double margin = 0.0;   // gamma - alpha(A_tilde) before any clamping
  Matrix p;
  double residual = 0.0; // lambda_max(A^T P + P A - 2 gamma P)
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// How the per-mode rate is placed above the spectral abscissa. The margin is
/// the first match of: per_mode[id], fixed, relative * (1 + |alpha|).
struct GammaPolicy {
  double relative = 0.05;
  std::optional<double> fixed;
  std::map<int, double> per_mode;
  double clamp_theta = 0.1;

  double margin_for(int mode_id, double alpha) const;
};

/// gamma = alpha + margin (stable modes falling to >= 0 are clamped to
/// alpha * (1 - theta)); P solves (A - gamma I)^T P + P (A - gamma I) = -I.
ModeCertificate solve_mode_certificate(const ModeMatrix& mm, double gamma_margin,
                                       double clamp_theta = 0.1);

/// lambda_max(A^T P + P A - 2 gamma P).
double certificate_residual(const Matrix& a_tilde, const Matrix& p, double gamma);

struct GammaAggregates {
  double gamma_bar_s = 0.0;
  double gamma_bar_u = 0.0;
  double gamma_tilde_default = 0.0;
  bool no_unstable_modes = false;
};

GammaAggregates gamma_aggregates(const std::vector<ModeCertificate>& certs,
                                 const std::set<int>& stable_set);

struct CertificateBundle {
  std::vector<ModeCertificate> certs;
  double p_under = 0.0;
  double p_over = 0.0;
  double xi_breve_norm_max = 0.0;
  double phi_bar = 0.0;
  double h_bar = 0.0;
  double n_hat = 0.0;
  double mu = 1.0;
  double vartheta_bar = 0.0;
  double theta_bar = 0.0;
  double c_bar = 0.0;
  double gamma_tilde = 0.0;
  double gamma_bar_s = 0.0;
  double gamma_bar_u = 0.0;
  // Filled by finalize_bound() once a signal is known.
  double varsigma_bar = 0.0;
  double epsilon = 0.0;
  bool bounded = false;
  bool finalized = false;

  const ModeCertificate& cert(int mode_id) const;
  SwitchingBudget budget() const;
  double gamma_for(int mode_id) const { return cert(mode_id).gamma; }
};

/// Signal-independent constants. gamma_tilde must lie in (gamma_bar_s, 0)
/// when given; the midpoint gamma_bar_s / 2 is used otherwise.
CertificateBundle assemble_constants(std::vector<ModeCertificate> certs,
                                     const ImpulseBounds& impulses, double h_bar,
                                     double n_hat, const std::set<int>& stable_set,
                                     std::optional<double> gamma_tilde = std::nullopt);

/// Computes varsigma_bar over every suffix of `sig` and the ultimate bound.
/// Leaves bounded = false (epsilon = +inf) when varsigma_bar >= 0 and the
/// perturbation terms are nonzero.
void finalize_bound(CertificateBundle& bundle, const SwitchingSignal& sig);

/// Both steps. Throws UnboundedCertificate when the bound diverges.
CertificateBundle assemble_bundle(std::vector<ModeCertificate> certs,
                                  const ImpulseBounds& impulses, double h_bar,
                                  const SwitchingSignal& sig, double n_hat,
                                  const std::set<int>& stable_set,
                                  std::optional<double> gamma_tilde = std::nullopt);

/// (1 - mu^k) / (1 - mu), with the limit k at mu = 1.
double geometric_sum(double mu, double k);

/// sqrt(1/P_under) * (c (G(N+1) + mu^(N+1)/(1 - e^s)) + Theta (G(N) + mu^N/(1 - e^s))).
double ultimate_bound(double c_bar, double theta_bar, double mu, double n_hat,
                      double varsigma_bar, double p_under);

}  // namespace omas

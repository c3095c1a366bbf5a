#include "omas/mode_dynamics.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "omas/errors.hpp"

namespace omas {

std::vector<std::string> AgentDynamics::warnings() const {
  std::vector<std::string> out;
  const double a_alpha = spectral_abscissa(a, "A");
  if (a_alpha < 0.0) {
    out.push_back("alpha(A) = " + std::to_string(a_alpha) +
                  " < 0: the tracking result assumes alpha(A) >= 0");
  }
  return out;
}

Matrix state_matrix(const AgentDynamics& dyn, const AugmentedMode& m, double rho) {
  const int n = m.n_agents() + 1;
  return kron(Matrix::Identity(n, n), dyn.a) +
         rho * kron(augmented_laplacian(m), Matrix::Identity(dyn.p(), dyn.p()));
}

double rho_upper_bound(const AgentDynamics& dyn, const std::vector<AugmentedMode>& modes) {
  const double a_alpha = spectral_abscissa(dyn.a, "A");
  double bound = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& m : modes) {
    if (classify_mode(m) != ModeClass::PositiveSpanning) continue;
    any = true;
    const std::string ctx = "-Z of mode " + std::to_string(m.id());
    const double neg_z_alpha = spectral_abscissa(-z_matrix(m), ctx.c_str());
    bound = std::min(bound, a_alpha / neg_z_alpha);
  }
  if (!any) {
    throw AssumptionViolation("no mode contains only positive edges and a spanning tree "
                              "rooted at the leader");
  }
  return bound;
}

double suggest_rho(double bound, double factor) {
  if (bound == 0.0) return -factor;
  return bound * factor;
}

ModeMatrix build_mode_matrix(const AgentDynamics& dyn, const AugmentedMode& m, double rho,
                             const BuildOptions& opts) {
  const int dim = dyn.p() * m.n_agents();
  if (dim > opts.max_dimension) {
    throw ConfigError("mode " + std::to_string(m.id()) + ": dimension " +
                      std::to_string(dim) + " exceeds the configured maximum " +
                      std::to_string(opts.max_dimension));
  }
  ModeMatrix mm;
  mm.mode_id = m.id();
  mm.n_agents = m.n_agents();
  mm.a_tilde = kron(Matrix::Identity(m.n_agents(), m.n_agents()), dyn.a) +
               rho * kron(z_matrix(m), Matrix::Identity(dyn.p(), dyn.p()));
  const std::string ctx = "mode " + std::to_string(m.id());
  mm.spectrum = eigenvalues(mm.a_tilde, 1e-4, ctx.c_str());
  mm.alpha = -std::numeric_limits<double>::infinity();
  for (const auto& l : mm.spectrum) mm.alpha = std::max(mm.alpha, l.real());
  mm.stable = mm.alpha < 0.0;
  return mm;
}

}  // namespace omas

#pragma once

#include <string>
#include <vector>

#include "omas/signed_graph.hpp"
#include "omas/spectrum.hpp"

namespace omas {

/// Open-loop agent (and leader) dynamics xi' = A xi with state dimension p.
struct AgentDynamics {
  Matrix a;

  int p() const { return static_cast<int>(a.rows()); }

  /// Leader-tracking needs alpha(A) >= 0; returns a message when violated.
  std::vector<std::string> warnings() const;
};

/// Closed-loop error dynamics of one mode: I (x) A + rho Z (x) I_p.
struct ModeMatrix {
  int mode_id = 0;
  int n_agents = 0;
  Matrix a_tilde;
  double alpha = 0.0;
  bool stable = false;
  std::vector<Complex> spectrum;
};

/// Same for the stacked state including the leader: I (x) A + rho Ltilde (x) I_p.
Matrix state_matrix(const AgentDynamics& dyn, const AugmentedMode& m, double rho);

/// min over PositiveSpanning modes of alpha(A) / alpha(-Z); a valid gain is
/// strictly below it. Throws AssumptionViolation without a spanning mode.
double rho_upper_bound(const AgentDynamics& dyn, const std::vector<AugmentedMode>& modes);

/// `factor` times the bound (further into the admissible half-line). A zero
/// bound is offset by -1 first so the suggestion is strictly admissible.
double suggest_rho(double bound, double factor = 2.0);

struct BuildOptions {
  int max_dimension = 512;
};

ModeMatrix build_mode_matrix(const AgentDynamics& dyn, const AugmentedMode& m, double rho,
                             const BuildOptions& opts = {});

}  // namespace omas

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "omas/spectrum.hpp"

namespace omas {

/// Jump data at one switching instant. Positions are 1-based; `leaves` index
/// the pre-jump agents, `joins` the post-jump agents. Leaves are applied
/// before joins when both occur.
struct MigrationEvent {
  int time_index = 0;
  int mode_before = 0;
  int mode_after = 0;
  int n_before = 0;
  int n_after = 0;
  std::vector<int> joins;
  std::vector<int> leaves;
  std::optional<Vector> phi_ind;  // length p * n_after
  std::optional<Matrix> xi_hat;   // p * n_after x p * n_before

  /// Throws ConfigError when counts or positions are inconsistent.
  void validate_positions() const;
  /// Additionally checks the impulse shapes for state dimension p.
  void validate(int p) const;
};

struct TransitionMap {
  int p = 0;
  int n_before = 0;
  int n_after = 0;
  Matrix xi;               // n_after x n_before, 0/1
  Matrix xi_aug;           // p(n_after+1) x p(n_before+1): [I_p, 0; 0, xi (x) I_p]
  Matrix xi_breve_err;     // p n_after x p n_before: xi (x) I_p + xi_hat
  Matrix xi_breve_state;   // p n_after x p(n_before+1): state-dependent impulse generator
};

Matrix build_xi(const MigrationEvent& ev);

/// [-1_N, I_N] (x) I_p: maps the stacked state (leader first) to tracking errors.
Matrix error_projection(int n_agents, int p);

TransitionMap build_transition_map(const MigrationEvent& ev, int p);

/// xi+ = xi_aug xi- + [0_p; phi_ind + xi_breve_state xi-]. An empty phi_ind means zero.
Vector apply_state_jump(const TransitionMap& tm, const Vector& xi_stacked,
                        const Vector& phi_ind = Vector());

/// e+ = xi_breve_err e- + phi_ind.
Vector apply_error_jump(const TransitionMap& tm, const Vector& err,
                        const Vector& phi_ind = Vector());

struct ImpulseBounds {
  double phi_bar = 0.0;
  double xi_breve_norm_max = 0.0;
};

/// State-independent impulse source: an explicit vector, or a fresh draw on
/// the sphere of the given radius for every instant.
struct ImpulseSpec {
  std::optional<Vector> vector;
  double sphere_radius = 0.0;

  bool present() const { return vector.has_value() || sphere_radius > 0.0; }
  double bound() const;
};

/// Template for every switch from `mode_before` to `mode_after`.
struct TransitionRule {
  int mode_before = 0;
  int mode_after = 0;
  std::vector<int> joins;
  std::vector<int> leaves;
  ImpulseSpec phi_ind;
  std::optional<Matrix> xi_hat;
};

using EventTable = std::vector<TransitionRule>;

/// Concrete event for the k-th switch. Random impulses draw from
/// derive_seed(seed, k). Without a matching rule the switch must keep the
/// agent count and becomes a pure relabeling with no impulse.
MigrationEvent instantiate_event(const EventTable& table, int k, int mode_before,
                                 int mode_after, const std::map<int, int>& mode_sizes, int p,
                                 std::uint64_t seed);

/// Max impulse norm over events, and max spectral norm of the error-space jump
/// matrix over the distinct (mode_after, mode_before) pairs.
ImpulseBounds impulse_bounds(const std::vector<MigrationEvent>& events, int p);

/// Same bounds over every rule of a table, covering all events it can produce.
ImpulseBounds impulse_bounds(const EventTable& table, const std::map<int, int>& mode_sizes,
                             int p);

}  // namespace omas

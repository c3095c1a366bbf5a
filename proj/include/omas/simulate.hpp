#pragma once

#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "omas/certificate.hpp"
#include "omas/integrator.hpp"
#include "omas/mode_dynamics.hpp"
#include "omas/perturbation.hpp"
#include "omas/switching.hpp"

namespace omas {

struct SimulationOptions {
  double dt = 1e-3;
  IntegratorKind integrator = IntegratorKind::Exact;
  double tail_fraction = 0.2;
  double convergence_tol = 1e-3;
  /// Keep every grid point up to this horizon, decimate by `stride` beyond it.
  double full_retention_horizon = 100.0;
  int stride = 10;
  /// Re-integrate every segment with the other integrator and record the gap.
  bool cross_check = false;
};

/// Everything a run needs. `signal` must carry one event per switch and
/// `initial_state` is the stacked state (leader first) of the initial mode.
struct SimulationSetup {
  AgentDynamics dyn;
  double rho = 0.0;
  std::map<int, AugmentedMode> modes;
  SwitchingSignal signal;
  PerturbationModel perturbation;
  Vector initial_state;
};

struct Sample {
  double t = 0.0;
  int mode = 0;
  Vector xi;   // p (N + 1), leader first
  Vector err;  // p N
};

struct EventSample {
  int k = 0;  // switch index, t_k
  Sample pre;
  Sample post;
  double jump_norm = 0.0;  // |err+ - (xi (x) I_p) err-|: the part beyond relabeling
};

struct SegmentInfo {
  int mode = 0;
  int n_agents = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double integrator_gap = -1.0;  // relative, only with cross_check
};

struct Trajectory {
  int p = 0;
  std::vector<Sample> samples;  // both one-sided values appear at a switch
  std::vector<EventSample> events;
  std::vector<SegmentInfo> segments;
};

struct SimulationSummary {
  double tail_start = 0.0;
  double tail_sup_error = 0.0;
  bool converged = false;
  std::optional<bool> bound_respected;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  double blowup_time = 0.0;
  double max_projection_gap = 0.0;   // max |err - Upsilon xi|
  double leader_deviation = 0.0;     // max |xi_0 - exp(A (t - t0)) xi_0(t0)|
  double max_perturbation_norm = 0.0;
  double max_integrator_gap = -1.0;
  double min_event_jump = 0.0;
};

struct SimulationResult {
  Trajectory traj;
  SimulationSummary summary;
};

/// Throws ConfigError when the signal, events, modes and initial state disagree.
void check_setup(const SimulationSetup& setup);

/// Integrates the stacked state and the error system segment by segment,
/// applying the migration jumps at every switching instant. A blown-up state
/// stops the run and is reported through summary.diverged.
SimulationResult run_scenario(const SimulationSetup& setup, const SimulationOptions& opts,
                              const CertificateBundle* bundle = nullptr);

struct LyapunovPoint {
  double t = 0.0;
  int mode = 0;
  double v = 0.0;
  double envelope = 0.0;
};

struct JumpCheck {
  int k = 0;
  double t = 0.0;
  double v_pre = 0.0;
  double v_post = 0.0;
  double bound = 0.0;  // mu v_pre + Theta_bar
  bool ok = false;
};

struct LyapunovTrace {
  std::vector<LyapunovPoint> points;
  std::vector<double> violation_times;
  std::vector<JumpCheck> jumps;
  double max_excess = 0.0;  // max over samples of (V - envelope) / envelope, -inf when empty

  bool ok() const;
};

/// V = sqrt(e^T P_mode e) at every sample against the comparison envelope
///   v' = g v + vartheta_bar on flows (g = gamma_bar_s or gamma_bar_u by class),
///   v+ = mu v- + Theta_bar at switches, v(t0) = V(t0).
LyapunovTrace lyapunov_trace(const Trajectory& traj, const CertificateBundle& bundle,
                             double rel_tol = 1e-6);

}  // namespace omas

#include "omas/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "omas/errors.hpp"

namespace omas {

void check_setup(const SimulationSetup& setup) {
  const int p = setup.dyn.p();
  if (p <= 0 || setup.dyn.a.cols() != p) throw ConfigError("dynamics.A must be square and non-empty");
  const auto& segs = setup.signal.segments();
  if (segs.empty()) throw ConfigError("signal has no segments");
  for (const auto& s : segs) {
    if (!setup.modes.count(s.mode)) {
      throw ConfigError("signal references unknown mode " + std::to_string(s.mode));
    }
  }
  const auto& events = setup.signal.events();
  if (static_cast<int>(events.size()) != setup.signal.n_switches()) {
    throw ConfigError("signal has " + std::to_string(setup.signal.n_switches()) +
                      " switches but " + std::to_string(events.size()) + " events");
  }
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& ev = events[k];
    const int before = segs[k].mode;
    const int after = segs[k + 1].mode;
    const std::string where = "event " + std::to_string(k + 1);
    if (ev.mode_before != before || ev.mode_after != after) {
      throw ConfigError(where + ": modes do not match the signal");
    }
    if (ev.n_before != setup.modes.at(before).n_agents() ||
        ev.n_after != setup.modes.at(after).n_agents()) {
      throw ConfigError(where + ": agent counts do not match the modes");
    }
    ev.validate(p);
  }
  const int n0 = setup.modes.at(segs.front().mode).n_agents();
  if (setup.initial_state.size() != p * (n0 + 1)) {
    throw ConfigError("initial_state must have p (N + 1) = " + std::to_string(p * (n0 + 1)) +
                      " entries");
  }
  setup.perturbation.validate();
}

namespace {

double relative_gap(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double diff = 0.0, scale = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, (a[i] - b[i]).norm());
    scale = std::max(scale, a[i].norm());
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

SimulationResult run_scenario(const SimulationSetup& setup, const SimulationOptions& opts,
                              const CertificateBundle* bundle) {
  check_setup(setup);
  if (!(opts.dt > 0.0)) throw ConfigError("simulation.dt must be positive");
  if (!(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0)) {
    throw ConfigError("simulation.tail_fraction must lie in (0, 1]");
  }

  const int p = setup.dyn.p();
  const auto& sig = setup.signal;
  const double t0 = sig.t0();
  const double tf = sig.tf();
  const int stride = (tf - t0) <= opts.full_retention_horizon ? 1 : std::max(1, opts.stride);
  const IntegratorKind other =
      opts.integrator == IntegratorKind::Exact ? IntegratorKind::Rk4 : IntegratorKind::Exact;

  SimulationResult res;
  Trajectory& traj = res.traj;
  SimulationSummary& sum = res.summary;
  traj.p = p;
  sum.tail_start = tf - opts.tail_fraction * (tf - t0);
  sum.min_event_jump = std::numeric_limits<double>::infinity();

  const Vector leader0 = setup.initial_state.head(p);
  const PerturbationModel& pert = setup.perturbation;

  Vector xi = setup.initial_state;
  Vector err = error_projection((int)(xi.size() / p) - 1, p) * xi;

  const auto& segs = sig.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const AugmentedMode& mode = setup.modes.at(segs[k].mode);
    const int n = mode.n_agents();
    const double ta = segs[k].start;
    const double tb = sig.segment_end(static_cast<int>(k));

    if (k > 0) {
      const MigrationEvent& ev = sig.events()[k - 1];
      const TransitionMap tm = build_transition_map(ev, p);
      const Vector phi = ev.phi_ind ? *ev.phi_ind : Vector();
      EventSample es;
      es.k = static_cast<int>(k);
      es.pre = traj.samples.back();
      xi = apply_state_jump(tm, xi, phi);
      err = apply_error_jump(tm, err, phi);
      es.post = Sample{ta, mode.id(), xi, err};
      const Matrix relabel = kron(tm.xi, Matrix::Identity(p, p));
      es.jump_norm = (err - relabel * es.pre.err).norm();
      sum.min_event_jump = std::min(sum.min_event_jump, es.jump_norm);
      traj.events.push_back(es);
    }

    const Matrix s_mat = state_matrix(setup.dyn, mode, setup.rho);
    const ModeMatrix mm = build_mode_matrix(setup.dyn, mode, setup.rho);
    const int dim_err = p * n;
    Forcing f_err, f_state;
    if (pert.kind != PerturbationKind::Zero && pert.h_bar > 0.0) {
      f_err = [&pert, dim_err](double t, bool left) { return pert.value(t, dim_err, left); };
      f_state = [&pert, dim_err, p](double t, bool left) {
        Vector v = Vector::Zero(dim_err + p);
        v.tail(dim_err) = pert.value(t, dim_err, left);
        return v;
      };
    }
    const std::vector<double> knots = pert.breakpoints(ta, tb);

    SegmentSamples xs =
        integrate_segment(s_mat, xi, f_state, ta, tb, opts.dt, opts.integrator, stride, knots);
    SegmentSamples es =
        integrate_segment(mm.a_tilde, err, f_err, ta, tb, opts.dt, opts.integrator, stride, knots);

    SegmentInfo info{mode.id(), n, ta, tb, -1.0};
    if (opts.cross_check) {
      const SegmentSamples xs2 =
          integrate_segment(s_mat, xi, f_state, ta, tb, opts.dt, other, stride, knots);
      const SegmentSamples es2 =
          integrate_segment(mm.a_tilde, err, f_err, ta, tb, opts.dt, other, stride, knots);
      info.integrator_gap = std::max(relative_gap(xs.x, xs2.x), relative_gap(es.x, es2.x));
      sum.max_integrator_gap = std::max(sum.max_integrator_gap, info.integrator_gap);
    }

    const Matrix upsilon = error_projection(n, p);
    const std::size_t count = std::min(xs.x.size(), es.x.size());
    for (std::size_t i = 0; i < count; ++i) {
      const double t = xs.t[i];
      traj.samples.push_back(Sample{t, mode.id(), xs.x[i], es.x[i]});
      sum.max_projection_gap =
          std::max(sum.max_projection_gap, (es.x[i] - upsilon * xs.x[i]).norm());
      const Vector leader = (setup.dyn.a * (t - t0)).exp() * leader0;
      sum.leader_deviation = std::max(sum.leader_deviation, (xs.x[i].head(p) - leader).norm());
      if (pert.kind != PerturbationKind::Zero) {
        sum.max_perturbation_norm =
            std::max(sum.max_perturbation_norm, pert.value(t, dim_err, false).norm());
      }
    }
    if (!xs.x.empty()) xi = xs.x.back();
    if (!es.x.empty()) err = es.x.back();
    if (!(count > 0 && xs.t.back() == es.t.back())) info.t_end = traj.samples.back().t;
    traj.segments.push_back(info);

    if (xs.diverged || es.diverged) {
      sum.diverged = true;
      sum.blowup_time = xs.diverged ? xs.blowup_time : es.blowup_time;
      if (es.diverged && xs.diverged) sum.blowup_time = std::min(xs.blowup_time, es.blowup_time);
      break;
    }
  }
  if (traj.events.empty()) sum.min_event_jump = 0.0;

  for (const auto& s : traj.samples) {
    if (s.t >= sum.tail_start) sum.tail_sup_error = std::max(sum.tail_sup_error, s.err.norm());
  }
  if (sum.diverged) sum.tail_sup_error = std::numeric_limits<double>::infinity();
  sum.converged = !sum.diverged && sum.tail_sup_error < opts.convergence_tol;
  if (bundle && bundle->finalized) {
    sum.epsilon = bundle->bounded ? bundle->epsilon : std::numeric_limits<double>::infinity();
    // A zero bound is the asymptotic statement; at a finite horizon it is read as convergence.
    if (bundle->bounded) {
      sum.bound_respected = bundle->epsilon == 0.0 ? sum.converged
                                                   : !sum.diverged && sum.tail_sup_error <= bundle->epsilon;
    }
  }
  return res;
}

bool LyapunovTrace::ok() const {
  return violation_times.empty() &&
         std::all_of(jumps.begin(), jumps.end(), [](const JumpCheck& j) { return j.ok; });
}

LyapunovTrace lyapunov_trace(const Trajectory& traj, const CertificateBundle& bundle,
                             double rel_tol) {
  LyapunovTrace out;
  out.max_excess = -std::numeric_limits<double>::infinity();
  if (traj.samples.empty()) return out;
  auto value = [&](int mode, const Vector& e) {
    const Matrix& pm = bundle.cert(mode).p;
    return std::sqrt(std::max(0.0, e.dot(pm * e)));
  };
  auto rate = [&](int mode) {
    return bundle.gamma_for(mode) < 0.0 ? bundle.gamma_bar_s : bundle.gamma_bar_u;
  };
  // v(t) = e^{g dt} v_s + vartheta (e^{g dt} - 1) / g
  auto flow = [&](double g, double v_s, double dt) {
    const double growth = std::exp(g * dt);
    const double forced =
        g == 0.0 ? bundle.vartheta_bar * dt : bundle.vartheta_bar * std::expm1(g * dt) / g;
    return growth * v_s + forced;
  };

  std::size_t next_event = 0;
  double seg_start = traj.samples.front().t;
  double env_start = value(traj.samples.front().mode, traj.samples.front().err);
  int seg_mode = traj.samples.front().mode;
  bool first_of_segment = true;

  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const Sample& s = traj.samples[i];
    // The post-jump sample starts a new segment.
    if (!first_of_segment && next_event < traj.events.size() &&
        s.t == traj.events[next_event].post.t && i > 0 && traj.samples[i - 1].t == s.t) {
      const EventSample& ev = traj.events[next_event];
      const double env_pre = flow(rate(seg_mode), env_start, s.t - seg_start);
      JumpCheck jc;
      jc.k = ev.k;
      jc.t = s.t;
      jc.v_pre = value(ev.pre.mode, ev.pre.err);
      jc.v_post = value(ev.post.mode, ev.post.err);
      jc.bound = bundle.mu * jc.v_pre + bundle.theta_bar;
      jc.ok = jc.v_post <= jc.bound * (1.0 + rel_tol);
      out.jumps.push_back(jc);
      env_start = bundle.mu * env_pre + bundle.theta_bar;
      seg_start = s.t;
      seg_mode = s.mode;
      ++next_event;
    }
    first_of_segment = false;
    LyapunovPoint pt{s.t, s.mode, value(s.mode, s.err), flow(rate(seg_mode), env_start, s.t - seg_start)};
    if (pt.v > pt.envelope * (1.0 + rel_tol) && pt.v - pt.envelope > 1e-300) {
      out.violation_times.push_back(pt.t);
    }
    if (pt.envelope > 0.0) out.max_excess = std::max(out.max_excess, (pt.v - pt.envelope) / pt.envelope);
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace omas

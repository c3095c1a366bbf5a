#include "omas/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "omas/errors.hpp"

namespace omas {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinity; unbounded quantities are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json spectrum_json(const std::vector<Complex>& s) {
  json a = json::array();
  for (const auto& z : s) a.push_back({z.real(), z.imag()});
  return a;
}

json matrix_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

}  // namespace

json analysis_to_json(const Analysis& a, const Scenario& sc) {
  json modes = json::array();
  for (const auto& m : a.modes) {
    json j = {{"id", m.id},
              {"class", to_string(m.cls)},
              {"n_agents", m.matrix.n_agents},
              {"alpha", m.matrix.alpha},
              {"stable", m.matrix.stable},
              {"laplacian_spectrum", spectrum_json(m.laplacian_spectrum)},
              {"z_spectrum", spectrum_json(m.z_spectrum)},
              {"negative_majority_definitions_agree", m.definitions_agree}};
    if (m.instability) {
      const auto& r = *m.instability;
      j["instability"] = {{"trace_ltilde", r.trace_ltilde},   {"trace_z", r.trace_z},
                          {"min_re_ltilde", r.min_re_ltilde}, {"min_re_z", r.min_re_z},
                          {"holds", r.holds()}};
    }
    modes.push_back(j);
  }
  return {{"p", sc.dyn.p()},
          {"rho", sc.rho},
          {"rho_bound", a.rho_bound ? json(*a.rho_bound) : json(nullptr)},
          {"rho_admissible", a.rho_admissible},
          {"modes", modes},
          {"stable_modes", a.stable},
          {"unstable_modes", a.unstable},
          {"assumption1", a.assumption1},
          {"assumption2", a.assumption2},
          {"warnings", a.warnings}};
}

std::string analysis_table(const Analysis& a) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-20s %-8s %-14s %-8s\n", "mode", "class", "agents", "alpha", "stable");
  os << line;
  for (const auto& m : a.modes) {
    std::snprintf(line, sizeof line, "%-6d %-20s %-8d %-14.9g %-8s\n", m.id, to_string(m.cls).c_str(),
                  m.matrix.n_agents, m.matrix.alpha, m.matrix.stable ? "yes" : "no");
    os << line;
  }
  auto list = [](const std::set<int>& s) {
    std::string out = "{";
    for (int id : s) out += (out.size() > 1 ? "," : "") + std::to_string(id);
    return out + "}";
  };
  os << "stable modes:   " << list(a.stable) << "\n";
  os << "unstable modes: " << list(a.unstable) << "\n";
  os << "assumption 1:   " << (a.assumption1 ? "met" : "UNMET") << "\n";
  os << "assumption 2:   " << (a.assumption2 ? "met" : "UNMET") << "\n";
  if (a.rho_bound) os << "rho bound:      " << num(*a.rho_bound) << (a.rho_admissible ? "" : "  (rho not admissible)") << "\n";
  for (const auto& w : a.warnings) os << "warning: " << w << "\n";
  return os.str();
}

json bundle_to_json(const CertificateBundle& b) {
  json certs = json::array();
  for (const auto& c : b.certs) {
    certs.push_back({{"mode", c.mode_id},
                     {"gamma", c.gamma},
                     {"margin", c.margin},
                     {"residual", c.residual},
                     {"lambda_min", c.lambda_min},
                     {"lambda_max", c.lambda_max},
                     {"P", matrix_json(c.p)}});
  }
  return {{"certificates", certs},
          {"p_under", b.p_under},
          {"p_over", b.p_over},
          {"xi_breve_norm_max", b.xi_breve_norm_max},
          {"phi_bar", b.phi_bar},
          {"h_bar", b.h_bar},
          {"n_hat", b.n_hat},
          {"mu", b.mu},
          {"vartheta_bar", b.vartheta_bar},
          {"theta_bar", b.theta_bar},
          {"c_bar", b.c_bar},
          {"gamma_tilde", b.gamma_tilde},
          {"gamma_bar_s", b.gamma_bar_s},
          {"gamma_bar_u", b.gamma_bar_u},
          {"varsigma_bar", b.varsigma_bar},
          {"epsilon", finite_or_null(b.epsilon)},
          {"bounded", b.bounded}};
}

json theorem1_to_json(const Theorem1Report& r, bool include_suffixes) {
  json j = {{"ok", r.ok},
            {"ratio_ok", r.ratio_ok},
            {"adt_ok", r.adt_ok},
            {"worst_j_ratio", r.worst_j_ratio},
            {"worst_j_adt", r.worst_j_adt},
            {"ratio_margin", finite_or_null(r.ratio_margin)},
            {"adt_margin", finite_or_null(r.adt_margin)},
            {"ratio_lower_bound", r.ratio_lower_bound},
            {"adt_lower_bound", r.adt_lower_bound}};
  if (include_suffixes) {
    json s = json::array();
    for (const auto& rec : r.suffixes) {
      s.push_back({{"j", rec.j},
                   {"t_j", rec.t_j},
                   {"switches", rec.switches},
                   {"T_s", rec.activation.stable},
                   {"T_u", rec.activation.unstable},
                   {"tau", finite_or_null(rec.tau)},
                   {"ratio_lhs", rec.ratio_lhs}});
    }
    j["suffixes"] = s;
  }
  return j;
}

json certification_to_json(const Certification& c) {
  json j = {{"stable_modes", c.analysis.stable},
            {"unstable_modes", c.analysis.unstable},
            {"impulses", {{"phi_bar", c.impulses.phi_bar}, {"xi_breve_norm_max", c.impulses.xi_breve_norm_max}}},
            {"bundle", bundle_to_json(c.bundle)},
            {"ratio_lower_bound", c.bundle.budget().ratio_lower_bound()},
            {"adt_lower_bound", c.bundle.budget().adt_lower_bound()},
            {"theorem1", theorem1_to_json(c.theorem1)},
            {"signal", signal_to_json(c.signal)}};
  if (c.calibration) {
    const auto& k = *c.calibration;
    j["calibration"] = {{"stable_margin", k.stable_margin},
                        {"unstable_margin", k.unstable_margin},
                        {"gamma_fraction", k.gamma_fraction},
                        {"gamma_tilde", k.gamma_tilde},
                        {"ratio_lower_bound", k.ratio_lb},
                        {"adt_lower_bound", k.adt_lb},
                        {"ratio_rel_error", k.ratio_rel_error},
                        {"adt_rel_error", k.adt_rel_error},
                        {"evaluations", k.evaluations}};
  }
  return j;
}

json signal_to_json(const SwitchingSignal& sig) {
  json segs = json::array();
  for (const auto& s : sig.segments()) segs.push_back({{"start", s.start}, {"mode", s.mode}});
  return {{"t0", sig.t0()}, {"tf", sig.tf()}, {"segments", segs}};
}

SwitchingSignal signal_from_json(const json& j) {
  try {
    std::vector<Segment> segs;
    for (const auto& s : j.at("segments")) segs.push_back(Segment{s.at("start").get<double>(), s.at("mode").get<int>()});
    return SwitchingSignal(j.value("t0", 0.0), j.at("tf").get<double>(), std::move(segs));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("signal file: ") + e.what());
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int p = traj.p;
  int n_max = 0;
  for (const auto& s : traj.segments) n_max = std::max(n_max, s.n_agents);
  os << "t,mode,agent_count";
  for (int i = 0; i <= n_max; ++i)
    for (int d = 1; d <= p; ++d) os << ",agent" << i << "_dim" << d;
  for (int i = 1; i <= n_max; ++i)
    for (int d = 1; d <= p; ++d) os << ",err" << i << "_dim" << d;
  os << "\n";
  for (const auto& s : traj.samples) {
    const int n = static_cast<int>(s.err.size()) / p;
    os << num(s.t) << ',' << s.mode << ',' << n;
    for (int k = 0; k < p * (n_max + 1); ++k) {
      os << ',';
      if (k < s.xi.size()) os << num(s.xi[k]);
    }
    for (int k = 0; k < p * n_max; ++k) {
      os << ',';
      if (k < s.err.size()) os << num(s.err[k]);
    }
    os << "\n";
  }
}

void write_event_csv(std::ostream& os, const Trajectory& traj) {
  os << "k,t,mode_before,mode_after,n_before,n_after,err_norm_pre,err_norm_post,jump_norm\n";
  const int p = traj.p;
  for (const auto& e : traj.events) {
    os << e.k << ',' << num(e.post.t) << ',' << e.pre.mode << ',' << e.post.mode << ','
       << e.pre.err.size() / p << ',' << e.post.err.size() / p << ',' << num(e.pre.err.norm()) << ','
       << num(e.post.err.norm()) << ',' << num(e.jump_norm) << "\n";
  }
}

void write_lyapunov_csv(std::ostream& os, const LyapunovTrace& tr) {
  os << "t,mode,V,envelope\n";
  for (const auto& p : tr.points) {
    os << num(p.t) << ',' << p.mode << ',' << num(p.v) << ',' << num(p.envelope) << "\n";
  }
}

json summary_to_json(const SimulationSummary& s, std::uint64_t seed, const LyapunovTrace* lyap) {
  json j = {{"seed", seed},
            {"tail_start", s.tail_start},
            {"tail_sup_error", finite_or_null(s.tail_sup_error)},
            {"epsilon", std::isnan(s.epsilon) ? json(nullptr) : finite_or_null(s.epsilon)},
            {"converged", s.converged},
            {"bound_respected", s.bound_respected ? json(*s.bound_respected) : json(nullptr)},
            {"diverged", s.diverged},
            {"blowup_time", s.diverged ? json(s.blowup_time) : json(nullptr)},
            {"max_projection_gap", s.max_projection_gap},
            {"leader_deviation", s.leader_deviation},
            {"max_perturbation_norm", s.max_perturbation_norm},
            {"min_event_jump", s.min_event_jump}};
  if (s.max_integrator_gap >= 0.0) j["max_integrator_gap"] = s.max_integrator_gap;
  if (s.bound_respected && std::isfinite(s.epsilon)) j["bound_margin"] = s.epsilon - s.tail_sup_error;
  if (lyap) {
    j["lyapunov"] = {{"ok", lyap->ok()},
                     {"violations", lyap->violation_times.size()},
                     {"first_violation", lyap->violation_times.empty() ? json(nullptr) : json(lyap->violation_times.front())},
                     {"max_excess", finite_or_null(lyap->max_excess)},
                     {"jump_checks", lyap->jumps.size()},
                     {"jump_failures", std::count_if(lyap->jumps.begin(), lyap->jumps.end(),
                                                     [](const JumpCheck& c) { return !c.ok; })}};
  }
  return j;
}

}  // namespace omas

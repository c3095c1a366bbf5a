/**
 * Acceptance checks for the four-mode open multi-agent example and the
 * property suites. Prints one PASS/FAIL line per criterion and exits non-zero
 * when any fails.
 */

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fixture.hpp"
#include "omas/certificate.hpp"
#include "omas/errors.hpp"
#include "omas/random.hpp"
#include "omas/scenario.hpp"
#include "omas/simulate.hpp"
#include "omas/spectrum.hpp"
#include "omas/switching.hpp"

using namespace omas;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Runs of the two fixture scenarios are shared by criteria 6-9.
struct Run {
  Scenario sc;
  Certification cert;
  SimulationResult res;
  double seconds = 0.0;
};

Run run_fixture(const std::string& name, bool cross_check) {
  Run r;
  const auto start = Clock::now();
  r.sc = load_scenario(fixture::scenario_path(name));
  r.sc.simulation.cross_check = cross_check;
  r.cert = certify(r.sc);
  r.res = run_scenario(build_setup(r.sc, r.cert.signal), r.sc.simulation, &r.cert.bundle);
  r.seconds = seconds_since(start);
  return r;
}

Outcome spectral_reproduction() {
  const auto start = Clock::now();
  const AgentDynamics dyn = fixture::dynamics();
  const auto modes = fixture::modes();
  double worst = 0.0;
  std::set<int> stable;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const ModeMatrix mm = build_mode_matrix(dyn, modes[i], fixture::kRho);
    worst = std::max(worst, std::abs(mm.alpha - fixture::kAlpha[i]));
    if (mm.stable) stable.insert(mm.mode_id);
  }
  const double secs = seconds_since(start);
  const bool pass = worst <= 1e-9 && stable == std::set<int>{1} && secs < 1.0;
  return {pass, "max |alpha - expected| = " + fmt("%.3g", worst) + ", stable set " +
                    (stable == std::set<int>{1} ? "{1}" : "other") + ", " + fmt("%.3f s", secs)};
}

// Unit-weight signed digraph with strictly more negative than positive edges
// (leader links included).
AugmentedMode random_negative_majority(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> size(1, 8);
  for (;;) {
    const int n = size(gen);
    std::vector<std::pair<int, int>> slots;  // (from, to), from = 0 is the leader
    for (int to = 1; to <= n; ++to)
      for (int from = 0; from <= n; ++from)
        if (from != to) slots.emplace_back(from, to);
    std::shuffle(slots.begin(), slots.end(), gen);
    std::uniform_int_distribution<int> count(1, static_cast<int>(slots.size()));
    const int m = count(gen);
    std::uniform_int_distribution<int> neg_count(m / 2 + 1, m);
    const int neg = neg_count(gen);
    std::vector<SignedEdge> edges;
    Vector d = Vector::Zero(n);
    for (int k = 0; k < m; ++k) {
      const double w = k < neg ? -1.0 : 1.0;
      auto [from, to] = slots[k];
      if (from == 0) d[to - 1] = w;
      else edges.push_back({from, to, w});
    }
    AugmentedMode mode(0, SignedDigraph(n, edges), d);
    if (classify_mode(mode) == ModeClass::NegativeMajority) return mode;
  }
}

Outcome negative_majority_instability() {
  std::mt19937_64 gen(derive_seed(2024, 2));
  int failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const AugmentedMode m = random_negative_majority(gen);
    // Oracle: traces and spectra straight from Eigen on the assembled matrices.
    const Matrix lt = augmented_laplacian(m);
    const Matrix z = z_matrix(m);
    auto min_re = [](const Matrix& x) {
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(x.cast<std::complex<double>>());
      return es.eigenvalues().real().minCoeff();
    };
    const bool oracle = lt.trace() < 0.0 && z.trace() < 0.0 && min_re(lt) < -1e-10 && min_re(z) < -1e-10;
    const InstabilityReport rep = check_negative_majority_instability(m);
    if (!oracle || !rep.holds()) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failures in 500 random modes"};
}

Outcome kronecker_sum_spectrum() {
  std::mt19937_64 gen(derive_seed(2024, 3));
  std::uniform_int_distribution<int> size(1, 5);
  double worst = 0.0;
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(gen), r = size(gen);
    const Matrix f = uniform_matrix(n, n, 1.0, gen);
    const Matrix g = uniform_matrix(r, r, 1.0, gen);
    const KroneckerCheck kc = kronecker_spectrum_check(f, g, 1e-8);
    // Oracle: nearest-neighbour distances in both directions between the
    // direct spectrum and the pairwise sums.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ef(f.cast<std::complex<double>>());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eg(g.cast<std::complex<double>>());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(kronecker_sum(f, g).cast<std::complex<double>>());
    std::vector<std::complex<double>> sums;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) sums.push_back(ef.eigenvalues()[i] + eg.eigenvalues()[j]);
    double haus = 0.0;
    for (int k = 0; k < n * r; ++k) {
      double best = INFINITY;
      for (const auto& s : sums) best = std::min(best, std::abs(es.eigenvalues()[k] - s));
      haus = std::max(haus, best);
      best = INFINITY;
      for (int q = 0; q < n * r; ++q) best = std::min(best, std::abs(es.eigenvalues()[q] - sums[k]));
      haus = std::max(haus, best);
    }
    worst = std::max({worst, kc.max_deviation, haus});
    if (!kc.matches || haus > 1e-8) ++mismatches;
  }
  return {mismatches == 0 && worst <= 1e-8,
          std::to_string(mismatches) + " mismatches, max deviation " + fmt("%.3g", worst)};
}

Outcome certificate_suite(const Run& practical) {
  const CertificateBundle& b = practical.cert.bundle;
  std::mt19937_64 gen(derive_seed(2024, 4));
  std::normal_distribution<double> normal;
  int failures = 0;
  double worst_residual = -INFINITY;
  for (const auto& mm : practical.cert.analysis.mode_matrices()) {
    const ModeCertificate& c = b.cert(mm.mode_id);
    const Matrix& p = c.p;
    Eigen::SelfAdjointEigenSolver<Matrix> pe(p);
    const Matrix q = mm.a_tilde.transpose() * p + p * mm.a_tilde - 2.0 * c.gamma * p;
    Eigen::SelfAdjointEigenSolver<Matrix> qe(0.5 * (q + q.transpose()));
    const double residual = qe.eigenvalues().maxCoeff();
    const double lmax = pe.eigenvalues().maxCoeff();
    worst_residual = std::max(worst_residual, residual / lmax);
    if (!(residual <= 1e-8 * lmax) || pe.eigenvalues().minCoeff() <= 0.0) ++failures;
    for (int s = 0; s < 100; ++s) {
      Vector e(mm.a_tilde.rows());
      for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = normal(gen);
      const double v2 = e.dot(p * e);
      const double n2 = e.squaredNorm();
      if (v2 < b.p_under * n2 * (1 - 1e-12) || v2 > b.p_over * n2 * (1 + 1e-12)) ++failures;
    }
  }
  int jumps = 0;
  for (const auto& ev : practical.cert.signal.events()) {
    const TransitionMap tm = build_transition_map(ev, practical.sc.dyn.p());
    const Matrix& p_pre = b.cert(ev.mode_before).p;
    const Matrix& p_post = b.cert(ev.mode_after).p;
    for (int s = 0; s < 100; ++s) {
      Vector e(tm.xi_breve_err.cols());
      for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = normal(gen);
      const Vector phi = ev.phi_ind ? *ev.phi_ind : Vector();
      const Vector post = apply_error_jump(tm, e, phi);
      const double v_pre = std::sqrt(e.dot(p_pre * e));
      const double v_post = std::sqrt(post.dot(p_post * post));
      if (v_post > (b.mu * v_pre + b.theta_bar) * (1 + 1e-12)) ++failures;
      ++jumps;
    }
  }
  return {failures == 0, std::to_string(failures) + " failures; worst residual/lambda_max " +
                             fmt("%.3g", worst_residual) + "; " + std::to_string(jumps) + " jump samples"};
}

Outcome calibration(const Run& practical) {
  const auto& cal = practical.cert.calibration;
  if (!cal) return {false, "scenario has no calibration"};
  const double r = practical.cert.bundle.budget().ratio_lower_bound();
  const double a = practical.cert.bundle.budget().adt_lower_bound();
  const double er = std::abs(r - 13.15) / 13.15;
  const double ea = std::abs(a - 2.42) / 2.42;
  return {er <= 0.15 && ea <= 0.15,
          "ratio " + fmt("%.4g", r) + " (" + fmt("%+.1f%%", 100 * (r - 13.15) / 13.15) + "), ADT " + fmt("%.4g", a) +
              " (" + fmt("%+.1f%%", 100 * (a - 2.42) / 2.42) + ") at stable margin " +
              fmt("%.4g", cal->stable_margin) + ", unstable margin " + fmt("%.4g", cal->unstable_margin) +
              ", gamma_tilde " + fmt("%.4g", cal->gamma_tilde)};
}

Outcome practical_tracking(const Run& run) {
  const auto& s = run.res.summary;
  int flat = 0;
  for (const auto& e : run.res.traj.events) {
    if (!(e.jump_norm > 1e-6)) ++flat;
  }
  const bool pass = !s.diverged && std::isfinite(s.tail_sup_error) && s.tail_sup_error <= s.epsilon &&
                    run.cert.theorem1.ok && flat == 0 && !run.res.traj.events.empty() && run.seconds < 30.0;
  return {pass, "tail sup " + fmt("%.4g", s.tail_sup_error) + " <= eps " + fmt("%.4g", s.epsilon) + ", " +
                    std::to_string(run.res.traj.events.size()) + " migrations, " + std::to_string(flat) +
                    " without a jump, " + fmt("%.2f s", run.seconds)};
}

Outcome asymptotic_tracking(const Run& run) {
  const auto& s = run.res.summary;
  return {!s.diverged && s.tail_sup_error < 1e-3 && run.sc.perturbation.bound() == 0.0,
          "tail sup " + fmt("%.3g", s.tail_sup_error) + ", eps " + fmt("%.3g", s.epsilon)};
}

Outcome lyapunov_envelope(const Run& run) {
  const LyapunovTrace tr = lyapunov_trace(run.res.traj, run.cert.bundle, 1e-6);
  return {tr.ok() && !tr.points.empty(),
          std::to_string(tr.points.size()) + " samples, " + std::to_string(tr.violation_times.size()) +
              " violations, max (V - env)/env " + fmt("%.3g", tr.max_excess) + ", " +
              std::to_string(tr.jumps.size()) + " jump checks"};
}

Outcome integrator_equivalence(const Run& a, const Run& b) {
  double worst = 0.0;
  int segments = 0;
  bool all_checked = true;
  for (const Run* r : {&a, &b}) {
    for (const auto& seg : r->res.traj.segments) {
      all_checked = all_checked && seg.integrator_gap >= 0.0;
      worst = std::max(worst, seg.integrator_gap);
      ++segments;
    }
  }
  return {all_checked && worst <= 1e-6,
          std::to_string(segments) + " segments, max relative gap " + fmt("%.3g", worst)};
}

// Brute-force recomputation of every suffix directly from the segment list.
struct OracleVerdict {
  bool ratio_ok = true;
  bool adt_ok = true;
  std::vector<int> switches;
  std::vector<double> ratio_lhs;
};

OracleVerdict brute_force(const SwitchingSignal& sig, const SwitchingBudget& b, const std::set<int>& stable) {
  OracleVerdict v;
  const auto& segs = sig.segments();
  const int k = static_cast<int>(segs.size()) - 1;
  for (int j = 0; j <= k; ++j) {
    const double tj = j == 0 ? sig.t0() : segs[j].start;
    double ts = 0.0, tu = 0.0;
    for (int i = 0; i <= k; ++i) {
      const double lo = std::max(segs[i].start, tj);
      const double hi = i == k ? sig.tf() : segs[i + 1].start;
      if (hi > lo) (stable.count(segs[i].mode) ? ts : tu) += hi - lo;
    }
    int n = 0;
    for (int i = 1; i <= k; ++i) n += segs[i].start >= tj ? 1 : 0;
    const double lhs = ts * (b.gamma_bar_s - b.gamma_tilde) + tu * (b.gamma_bar_u - b.gamma_tilde);
    const double tau = n > b.n_hat ? (sig.tf() - tj) / (n - b.n_hat) : INFINITY;
    v.ratio_ok = v.ratio_ok && lhs <= 0.0;
    v.adt_ok = v.adt_ok && tau >= b.adt_lower_bound();
    v.switches.push_back(n);
    v.ratio_lhs.push_back(lhs);
  }
  return v;
}

Outcome suffix_oracle() {
  std::mt19937_64 gen(derive_seed(2024, 10));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0, passing = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int nseg = 1 + static_cast<int>(u(gen) * 12);
    std::vector<Segment> segs;
    double t = 0.0;
    int prev = -1;
    for (int i = 0; i < nseg; ++i) {
      int mode;
      do mode = 1 + static_cast<int>(u(gen) * 3); while (mode == prev);
      segs.push_back({t, mode});
      prev = mode;
      t += (mode == 1 ? 2.0 + 6.0 * u(gen) : 0.1 + 0.9 * u(gen));
    }
    const SwitchingSignal sig(0.0, t, segs);
    SwitchingBudget b;
    b.gamma_bar_s = -(0.5 + 2.5 * u(gen));
    b.gamma_bar_u = 3.0 * u(gen);
    b.gamma_tilde = b.gamma_bar_s * (0.1 + 0.8 * u(gen));
    b.mu = 1.0 + 2.0 * u(gen);
    b.n_hat = static_cast<int>(u(gen) * 3);
    const std::set<int> stable{1};
    const Theorem1Report rep = validate_theorem1(sig, b, stable, SuffixMode::All);
    const OracleVerdict o = brute_force(sig, b, stable);
    bool agree = rep.ratio_ok == o.ratio_ok && rep.adt_ok == o.adt_ok && rep.ok == (o.ratio_ok && o.adt_ok) &&
                 rep.suffixes.size() == o.switches.size();
    for (std::size_t j = 0; agree && j < o.switches.size(); ++j) {
      agree = rep.suffixes[j].switches == o.switches[j] &&
              std::abs(rep.suffixes[j].ratio_lhs - o.ratio_lhs[j]) <= 1e-9 * (1 + std::abs(o.ratio_lhs[j]));
    }
    disagreements += agree ? 0 : 1;
    passing += rep.ok ? 1 : 0;
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements over 100 signals (" +
                                  std::to_string(passing) + " compliant)"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&failed](int id, const char* name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };

  report(1, "spectral reproduction", spectral_reproduction);
  report(2, "negative-majority instability", negative_majority_instability);
  report(3, "Kronecker-sum spectrum", kronecker_sum_spectrum);

  Run practical, asymptotic;
  std::string setup_error;
  try {
    practical = run_fixture("four_mode_practical.json", true);
    asymptotic = run_fixture("four_mode_asymptotic.json", true);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  auto guarded = [&](const std::function<Outcome()>& f) {
    return [&, f]() -> Outcome {
      if (!setup_error.empty()) return {false, "fixture run failed: " + setup_error};
      return f();
    };
  };

  report(4, "mode certificates", guarded([&] { return certificate_suite(practical); }));
  report(5, "switching-bound calibration", guarded([&] { return calibration(practical); }));
  report(6, "practical tracking", guarded([&] { return practical_tracking(practical); }));
  report(7, "asymptotic tracking", guarded([&] { return asymptotic_tracking(asymptotic); }));
  report(8, "Lyapunov envelope", guarded([&] { return lyapunov_envelope(asymptotic); }));
  report(9, "integrator equivalence", guarded([&] { return integrator_equivalence(practical, asymptotic); }));
  report(10, "suffix validator oracle", suffix_oracle);

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}

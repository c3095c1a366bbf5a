#include "omas/scenario.hpp"

#include <cmath>
#include <fstream>

#include "omas/errors.hpp"
#include "omas/random.hpp"

namespace omas {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!node.is_object()) fail(path, "expected an object");
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& node, const char* key, const std::string& path) {
  if (!node.contains(key)) fail(path + "." + key, "missing required field");
  return node.at(key);
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool read_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vector read_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = read_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix read_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) fail(path + "[0]", "expected a row array");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const Vector row = read_vector(j[r], rp);
    if (static_cast<std::size_t>(row.size()) != cols) fail(rp, "row length differs from row 0");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::vector<int> read_ints(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_int(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json write_vector(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json write_matrix(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(write_vector(m.row(r).transpose()));
  return a;
}

AugmentedMode parse_mode(const json& node, const std::string& path) {
  check_keys(node, path, {"id", "L", "D", "n_agents", "edges", "leader_links"});
  const int id = read_int(require(node, "id", path), path + ".id");
  try {
    if (node.contains("L")) {
      const Matrix l = read_matrix(node.at("L"), path + ".L");
      if (l.rows() != l.cols()) fail(path + ".L", "must be square");
      const json& dj = require(node, "D", path);
      Vector d;
      if (dj.is_array() && !dj.empty() && dj[0].is_array()) {
        const Matrix dm = read_matrix(dj, path + ".D");
        if (dm.rows() != dm.cols()) fail(path + ".D", "must be square");
        if (!(dm - Matrix(dm.diagonal().asDiagonal())).isZero(0.0)) fail(path + ".D", "must be diagonal");
        d = dm.diagonal();
      } else {
        d = read_vector(dj, path + ".D");
      }
      if (d.size() != l.rows()) fail(path + ".D", "size differs from L");
      return AugmentedMode(id, SignedDigraph::from_laplacian(l), d);
    }
    const int n = read_int(require(node, "n_agents", path), path + ".n_agents");
    std::vector<SignedEdge> edges;
    if (node.contains("edges")) {
      const json& ej = node.at("edges");
      if (!ej.is_array()) fail(path + ".edges", "expected an array");
      for (std::size_t i = 0; i < ej.size(); ++i) {
        const std::string ep = path + ".edges[" + std::to_string(i) + "]";
        check_keys(ej[i], ep, {"from", "to", "weight"});
        SignedEdge e;
        e.from = read_int(require(ej[i], "from", ep), ep + ".from");
        e.to = read_int(require(ej[i], "to", ep), ep + ".to");
        if (ej[i].contains("weight")) e.weight = read_number(ej[i].at("weight"), ep + ".weight");
        edges.push_back(e);
      }
    }
    Vector d = node.contains("leader_links") ? read_vector(node.at("leader_links"), path + ".leader_links")
                                             : Vector::Zero(n);
    return AugmentedMode(id, SignedDigraph(n, std::move(edges)), d);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }
}

json serialize_mode(const AugmentedMode& m) {
  json edges = json::array();
  for (const auto& e : m.graph().edges()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  }
  return {{"id", m.id()},
          {"n_agents", m.n_agents()},
          {"edges", edges},
          {"leader_links", write_vector(m.leader_links())}};
}

ImpulseSpec parse_impulse(const json& node, const std::string& path) {
  check_keys(node, path, {"vector", "sphere_radius"});
  ImpulseSpec s;
  if (node.contains("vector")) s.vector = read_vector(node.at("vector"), path + ".vector");
  if (node.contains("sphere_radius")) {
    s.sphere_radius = read_number(node.at("sphere_radius"), path + ".sphere_radius");
    if (s.sphere_radius < 0.0) fail(path + ".sphere_radius", "must be >= 0");
  }
  if (s.vector && s.sphere_radius > 0.0) fail(path, "give either vector or sphere_radius");
  return s;
}

RuleSpec parse_rule(const json& node, const std::string& path, const Scenario& sc) {
  check_keys(node, path, {"from", "to", "joins", "leaves", "phi_ind", "xi_hat"});
  RuleSpec r;
  r.mode_before = read_int(require(node, "from", path), path + ".from");
  r.mode_after = read_int(require(node, "to", path), path + ".to");
  if (node.contains("joins")) r.joins = read_ints(node.at("joins"), path + ".joins");
  if (node.contains("leaves")) r.leaves = read_ints(node.at("leaves"), path + ".leaves");
  if (node.contains("phi_ind")) r.phi_ind = parse_impulse(node.at("phi_ind"), path + ".phi_ind");
  if (node.contains("xi_hat")) {
    const json& x = node.at("xi_hat");
    const std::string xp = path + ".xi_hat";
    check_keys(x, xp, {"matrix", "random_scale"});
    if (x.contains("matrix")) r.xi_hat.matrix = read_matrix(x.at("matrix"), xp + ".matrix");
    if (x.contains("random_scale")) {
      r.xi_hat.random_scale = read_number(x.at("random_scale"), xp + ".random_scale");
      if (r.xi_hat.random_scale < 0.0) fail(xp + ".random_scale", "must be >= 0");
    }
    if (r.xi_hat.matrix && r.xi_hat.random_scale > 0.0) fail(xp, "give either matrix or random_scale");
  }
  int nb = 0, na = 0;
  try {
    nb = sc.mode(r.mode_before).n_agents();
    na = sc.mode(r.mode_after).n_agents();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  MigrationEvent ev;
  ev.mode_before = r.mode_before;
  ev.mode_after = r.mode_after;
  ev.n_before = nb;
  ev.n_after = na;
  ev.joins = r.joins;
  ev.leaves = r.leaves;
  if (r.phi_ind.vector) ev.phi_ind = r.phi_ind.vector;
  ev.xi_hat = r.xi_hat.matrix;
  try {
    ev.validate(sc.dyn.p());
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return r;
}

json serialize_rule(const RuleSpec& r) {
  json j = {{"from", r.mode_before}, {"to", r.mode_after}, {"joins", r.joins}, {"leaves", r.leaves}};
  json phi = json::object();
  if (r.phi_ind.vector) phi["vector"] = write_vector(*r.phi_ind.vector);
  if (r.phi_ind.sphere_radius > 0.0) phi["sphere_radius"] = r.phi_ind.sphere_radius;
  if (!phi.empty()) j["phi_ind"] = phi;
  json xh = json::object();
  if (r.xi_hat.matrix) xh["matrix"] = write_matrix(*r.xi_hat.matrix);
  if (r.xi_hat.random_scale > 0.0) xh["random_scale"] = r.xi_hat.random_scale;
  if (!xh.empty()) j["xi_hat"] = xh;
  return j;
}

SuffixMode suffix_mode_from_string(const std::string& s, const std::string& path) {
  if (s == "all") return SuffixMode::All;
  if (s == "first") return SuffixMode::First;
  fail(path, "expected \"all\" or \"first\"");
}

}  // namespace

const AugmentedMode& Scenario::mode(int id) const {
  for (const auto& m : modes) {
    if (m.id() == id) return m;
  }
  throw ConfigError("unknown mode " + std::to_string(id));
}

std::map<int, int> Scenario::mode_sizes() const {
  std::map<int, int> out;
  for (const auto& m : modes) out[m.id()] = m.n_agents();
  return out;
}

Scenario parse_scenario(const json& doc) {
  const std::string root = "scenario";
  check_keys(doc, root, {"dynamics", "modes", "signal", "events", "perturbation", "initial_state",
                         "certification", "simulation", "seed"});
  Scenario sc;

  const json& dyn = require(doc, "dynamics", root);
  check_keys(dyn, "dynamics", {"A", "rho"});
  sc.dyn.a = read_matrix(require(dyn, "A", "dynamics"), "dynamics.A");
  if (sc.dyn.a.rows() != sc.dyn.a.cols()) fail("dynamics.A", "must be square");
  sc.rho = read_number(require(dyn, "rho", "dynamics"), "dynamics.rho");

  const json& modes = require(doc, "modes", root);
  if (!modes.is_array() || modes.empty()) fail("modes", "expected a non-empty array");
  std::set<int> ids;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string mp = "modes[" + std::to_string(i) + "]";
    AugmentedMode m = parse_mode(modes[i], mp);
    if (!ids.insert(m.id()).second) fail(mp + ".id", "duplicate mode id " + std::to_string(m.id()));
    sc.modes.push_back(std::move(m));
  }

  const json& sig = require(doc, "signal", root);
  check_keys(sig, "signal", {"t0", "tf", "segments", "generate"});
  sc.signal.t0 = sig.contains("t0") ? read_number(sig.at("t0"), "signal.t0") : 0.0;
  sc.signal.tf = read_number(require(sig, "tf", "signal"), "signal.tf");
  if (!(sc.signal.tf > sc.signal.t0)) fail("signal.tf", "must exceed t0");
  if (sig.contains("segments") == sig.contains("generate")) {
    fail("signal", "give exactly one of segments or generate");
  }
  if (sig.contains("segments")) {
    const json& segs = sig.at("segments");
    if (!segs.is_array() || segs.empty()) fail("signal.segments", "expected a non-empty array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string sp = "signal.segments[" + std::to_string(i) + "]";
      check_keys(segs[i], sp, {"start", "mode"});
      Segment s;
      s.start = read_number(require(segs[i], "start", sp), sp + ".start");
      s.mode = read_int(require(segs[i], "mode", sp), sp + ".mode");
      if (!ids.count(s.mode)) fail(sp + ".mode", "unknown mode " + std::to_string(s.mode));
      sc.signal.segments.push_back(s);
    }
  } else {
    const json& g = sig.at("generate");
    check_keys(g, "signal.generate", {"target_margin"});
    GenerateSpec gs;
    if (g.contains("target_margin")) {
      gs.target_margin = read_number(g.at("target_margin"), "signal.generate.target_margin");
      if (gs.target_margin < 0.0) fail("signal.generate.target_margin", "must be >= 0");
    }
    sc.signal.generate = gs;
  }

  if (doc.contains("events")) {
    const json& ev = doc.at("events");
    if (!ev.is_array()) fail("events", "expected an array");
    for (std::size_t i = 0; i < ev.size(); ++i) {
      sc.events.push_back(parse_rule(ev[i], "events[" + std::to_string(i) + "]", sc));
    }
  }

  if (doc.contains("perturbation")) {
    const json& pj = doc.at("perturbation");
    const std::string pp = "perturbation";
    check_keys(pj, pp, {"kind", "h_bar", "amplitude", "frequency", "hold"});
    try {
      sc.perturbation.kind = perturbation_kind_from_string(read_string(require(pj, "kind", pp), pp + ".kind"));
    } catch (const ConfigError& e) {
      fail(pp + ".kind", e.what());
    }
    if (pj.contains("h_bar")) sc.perturbation.h_bar = read_number(pj.at("h_bar"), pp + ".h_bar");
    if (pj.contains("amplitude")) sc.perturbation.amplitude = read_number(pj.at("amplitude"), pp + ".amplitude");
    if (pj.contains("frequency")) sc.perturbation.frequency = read_number(pj.at("frequency"), pp + ".frequency");
    if (pj.contains("hold")) sc.perturbation.hold = read_number(pj.at("hold"), pp + ".hold");
    try {
      sc.perturbation.validate();
    } catch (const ConfigError& e) {
      fail(pp, e.what());
    }
  }

  if (doc.contains("initial_state")) {
    const json& ij = doc.at("initial_state");
    check_keys(ij, "initial_state", {"values", "random_radius"});
    if (ij.contains("values")) sc.initial_state.values = read_vector(ij.at("values"), "initial_state.values");
    if (ij.contains("random_radius")) {
      sc.initial_state.random_radius = read_number(ij.at("random_radius"), "initial_state.random_radius");
    }
  }

  if (doc.contains("certification")) {
    const json& cj = doc.at("certification");
    const std::string cp = "certification";
    check_keys(cj, cp, {"relative_margin", "fixed_margin", "per_mode_margin", "clamp_theta", "gamma_tilde",
                        "gamma_fraction", "n_hat", "validate_suffixes", "calibration_targets"});
    auto& c = sc.certification;
    if (cj.contains("relative_margin")) c.policy.relative = read_number(cj.at("relative_margin"), cp + ".relative_margin");
    if (cj.contains("fixed_margin")) c.policy.fixed = read_number(cj.at("fixed_margin"), cp + ".fixed_margin");
    if (cj.contains("per_mode_margin")) {
      const json& pm = cj.at("per_mode_margin");
      const std::string pp = cp + ".per_mode_margin";
      if (!pm.is_object()) fail(pp, "expected an object keyed by mode id");
      for (auto it = pm.begin(); it != pm.end(); ++it) {
        int id = 0;
        try {
          std::size_t used = 0;
          id = std::stoi(it.key(), &used);
          if (used != it.key().size()) throw std::invalid_argument(it.key());
        } catch (const std::exception&) {
          fail(pp + "." + it.key(), "key must be a mode id");
        }
        if (!ids.count(id)) fail(pp + "." + it.key(), "unknown mode");
        c.policy.per_mode[id] = read_number(it.value(), pp + "." + it.key());
      }
    }
    if (cj.contains("clamp_theta")) c.policy.clamp_theta = read_number(cj.at("clamp_theta"), cp + ".clamp_theta");
    if (cj.contains("gamma_tilde")) c.gamma_tilde = read_number(cj.at("gamma_tilde"), cp + ".gamma_tilde");
    if (cj.contains("gamma_fraction")) {
      c.gamma_fraction = read_number(cj.at("gamma_fraction"), cp + ".gamma_fraction");
      if (!(*c.gamma_fraction > 0.0 && *c.gamma_fraction < 1.0)) fail(cp + ".gamma_fraction", "must lie in (0, 1)");
    }
    if (c.gamma_tilde && c.gamma_fraction) fail(cp, "give at most one of gamma_tilde and gamma_fraction");
    if (cj.contains("n_hat")) {
      c.n_hat = read_number(cj.at("n_hat"), cp + ".n_hat");
      if (c.n_hat < 0.0) fail(cp + ".n_hat", "must be >= 0");
    }
    if (cj.contains("validate_suffixes")) {
      c.suffixes = suffix_mode_from_string(read_string(cj.at("validate_suffixes"), cp + ".validate_suffixes"),
                                           cp + ".validate_suffixes");
    }
    if (cj.contains("calibration_targets")) {
      const json& t = cj.at("calibration_targets");
      const std::string tp = cp + ".calibration_targets";
      check_keys(t, tp, {"ratio", "adt"});
      CalibrationTargets ct;
      ct.ratio = read_number(require(t, "ratio", tp), tp + ".ratio");
      ct.adt = read_number(require(t, "adt", tp), tp + ".adt");
      if (!(ct.ratio > 0.0 && ct.adt > 0.0)) fail(tp, "targets must be positive");
      c.calibration = ct;
    }
  }

  if (doc.contains("simulation")) {
    const json& sj = doc.at("simulation");
    const std::string sp = "simulation";
    check_keys(sj, sp, {"dt", "integrator", "tail_fraction", "convergence_tol", "full_retention_horizon",
                        "stride", "cross_check"});
    auto& o = sc.simulation;
    if (sj.contains("dt")) o.dt = read_number(sj.at("dt"), sp + ".dt");
    if (!(o.dt > 0.0)) fail(sp + ".dt", "must be positive");
    if (sj.contains("integrator")) {
      try {
        o.integrator = integrator_kind_from_string(read_string(sj.at("integrator"), sp + ".integrator"));
      } catch (const ConfigError& e) {
        fail(sp + ".integrator", e.what());
      }
    }
    if (sj.contains("tail_fraction")) o.tail_fraction = read_number(sj.at("tail_fraction"), sp + ".tail_fraction");
    if (!(o.tail_fraction > 0.0 && o.tail_fraction <= 1.0)) fail(sp + ".tail_fraction", "must lie in (0, 1]");
    if (sj.contains("convergence_tol")) o.convergence_tol = read_number(sj.at("convergence_tol"), sp + ".convergence_tol");
    if (sj.contains("full_retention_horizon")) {
      o.full_retention_horizon = read_number(sj.at("full_retention_horizon"), sp + ".full_retention_horizon");
    }
    if (sj.contains("stride")) {
      o.stride = read_int(sj.at("stride"), sp + ".stride");
      if (o.stride < 1) fail(sp + ".stride", "must be >= 1");
    }
    if (sj.contains("cross_check")) o.cross_check = read_bool(sj.at("cross_check"), sp + ".cross_check");
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    sc.seed = s.get<std::uint64_t>();
  }

  if (sc.initial_state.values && !sc.signal.segments.empty()) {
    const int n0 = sc.mode(sc.signal.segments.front().mode).n_agents();
    if (sc.initial_state.values->size() != sc.dyn.p() * (n0 + 1)) {
      fail("initial_state.values", "expected p (N + 1) = " + std::to_string(sc.dyn.p() * (n0 + 1)) + " entries");
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

json serialize_scenario(const Scenario& sc) {
  json doc;
  doc["dynamics"] = {{"A", write_matrix(sc.dyn.a)}, {"rho", sc.rho}};
  json modes = json::array();
  for (const auto& m : sc.modes) modes.push_back(serialize_mode(m));
  doc["modes"] = modes;

  json sig = {{"t0", sc.signal.t0}, {"tf", sc.signal.tf}};
  if (sc.signal.generate) {
    sig["generate"] = {{"target_margin", sc.signal.generate->target_margin}};
  } else {
    json segs = json::array();
    for (const auto& s : sc.signal.segments) segs.push_back({{"start", s.start}, {"mode", s.mode}});
    sig["segments"] = segs;
  }
  doc["signal"] = sig;

  json events = json::array();
  for (const auto& r : sc.events) events.push_back(serialize_rule(r));
  doc["events"] = events;

  const auto& pm = sc.perturbation;
  doc["perturbation"] = {{"kind", to_string(pm.kind)},
                         {"h_bar", pm.h_bar},
                         {"amplitude", pm.amplitude},
                         {"frequency", pm.frequency},
                         {"hold", pm.hold}};

  json init = {{"random_radius", sc.initial_state.random_radius}};
  if (sc.initial_state.values) init["values"] = write_vector(*sc.initial_state.values);
  doc["initial_state"] = init;

  const auto& c = sc.certification;
  json cj = {{"relative_margin", c.policy.relative}, {"clamp_theta", c.policy.clamp_theta}, {"n_hat", c.n_hat}};
  if (c.policy.fixed) cj["fixed_margin"] = *c.policy.fixed;
  if (!c.policy.per_mode.empty()) {
    json pmj = json::object();
    for (const auto& [id, v] : c.policy.per_mode) pmj[std::to_string(id)] = v;
    cj["per_mode_margin"] = pmj;
  }
  if (c.gamma_tilde) cj["gamma_tilde"] = *c.gamma_tilde;
  if (c.gamma_fraction) cj["gamma_fraction"] = *c.gamma_fraction;
  if (c.suffixes) cj["validate_suffixes"] = *c.suffixes == SuffixMode::All ? "all" : "first";
  if (c.calibration) cj["calibration_targets"] = {{"ratio", c.calibration->ratio}, {"adt", c.calibration->adt}};
  doc["certification"] = cj;

  const auto& o = sc.simulation;
  doc["simulation"] = {{"dt", o.dt},
                       {"integrator", to_string(o.integrator)},
                       {"tail_fraction", o.tail_fraction},
                       {"convergence_tol", o.convergence_tol},
                       {"full_retention_horizon", o.full_retention_horizon},
                       {"stride", o.stride},
                       {"cross_check", o.cross_check}};
  doc["seed"] = sc.seed;
  return doc;
}

bool equivalent(const Scenario& a, const Scenario& b) {
  if (a.dyn.a != b.dyn.a || a.rho != b.rho || a.seed != b.seed) return false;
  if (a.modes.size() != b.modes.size()) return false;
  for (std::size_t i = 0; i < a.modes.size(); ++i) {
    if (a.modes[i].id() != b.modes[i].id()) return false;
    if (augmented_laplacian(a.modes[i]) != augmented_laplacian(b.modes[i])) return false;
  }
  const auto& sa = a.signal;
  const auto& sb = b.signal;
  if (sa.t0 != sb.t0 || sa.tf != sb.tf || sa.segments.size() != sb.segments.size()) return false;
  for (std::size_t i = 0; i < sa.segments.size(); ++i) {
    if (sa.segments[i].start != sb.segments[i].start || sa.segments[i].mode != sb.segments[i].mode) return false;
  }
  if (sa.generate.has_value() != sb.generate.has_value()) return false;
  if (sa.generate && sa.generate->target_margin != sb.generate->target_margin) return false;
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& ra = a.events[i];
    const auto& rb = b.events[i];
    if (ra.mode_before != rb.mode_before || ra.mode_after != rb.mode_after || ra.joins != rb.joins ||
        ra.leaves != rb.leaves || ra.phi_ind.sphere_radius != rb.phi_ind.sphere_radius ||
        ra.phi_ind.vector.has_value() != rb.phi_ind.vector.has_value() || !(ra.xi_hat == rb.xi_hat)) {
      return false;
    }
    if (ra.phi_ind.vector && *ra.phi_ind.vector != *rb.phi_ind.vector) return false;
  }
  const auto& pa = a.perturbation;
  const auto& pb = b.perturbation;
  if (pa.kind != pb.kind || pa.h_bar != pb.h_bar || pa.amplitude != pb.amplitude ||
      pa.frequency != pb.frequency || pa.hold != pb.hold) {
    return false;
  }
  if (a.initial_state.random_radius != b.initial_state.random_radius ||
      a.initial_state.values.has_value() != b.initial_state.values.has_value()) {
    return false;
  }
  if (a.initial_state.values && *a.initial_state.values != *b.initial_state.values) return false;
  const auto& ca = a.certification;
  const auto& cb = b.certification;
  if (ca.policy.relative != cb.policy.relative || ca.policy.fixed != cb.policy.fixed ||
      ca.policy.per_mode != cb.policy.per_mode || ca.policy.clamp_theta != cb.policy.clamp_theta ||
      ca.gamma_tilde != cb.gamma_tilde || ca.gamma_fraction != cb.gamma_fraction || ca.n_hat != cb.n_hat ||
      ca.suffixes != cb.suffixes || ca.calibration.has_value() != cb.calibration.has_value()) {
    return false;
  }
  if (ca.calibration &&
      (ca.calibration->ratio != cb.calibration->ratio || ca.calibration->adt != cb.calibration->adt)) {
    return false;
  }
  const auto& oa = a.simulation;
  const auto& ob = b.simulation;
  return oa.dt == ob.dt && oa.integrator == ob.integrator && oa.tail_fraction == ob.tail_fraction &&
         oa.convergence_tol == ob.convergence_tol && oa.full_retention_horizon == ob.full_retention_horizon &&
         oa.stride == ob.stride && oa.cross_check == ob.cross_check;
}

std::vector<ModeMatrix> Analysis::mode_matrices() const {
  std::vector<ModeMatrix> out;
  for (const auto& m : modes) out.push_back(m.matrix);
  return out;
}

Analysis analyze(const Scenario& sc) {
  Analysis a;
  a.warnings = sc.dyn.warnings();
  bool positive_spanning = false, some_negative = false, negatives_are_majority = true;
  for (const auto& m : sc.modes) {
    ModeAnalysis ma;
    ma.id = m.id();
    ma.cls = classify_mode(m);
    ma.matrix = build_mode_matrix(sc.dyn, m, sc.rho);
    ma.laplacian_spectrum = eigenvalues(augmented_laplacian(m));
    ma.z_spectrum = eigenvalues(z_matrix(m));
    ma.definitions_agree = negative_majority_definitions_agree(m);
    if (!ma.definitions_agree) {
      a.warnings.push_back("mode " + std::to_string(m.id()) +
                           ": edge-count and weight-sum negative-majority tests disagree");
    }
    if (ma.cls == ModeClass::NegativeMajority) ma.instability = check_negative_majority_instability(m);
    const EdgeCensus census = edge_census(m);
    positive_spanning = positive_spanning || ma.cls == ModeClass::PositiveSpanning;
    if (census.negative > 0) {
      some_negative = true;
      negatives_are_majority = negatives_are_majority && ma.cls == ModeClass::NegativeMajority;
    }
    (ma.matrix.stable ? a.stable : a.unstable).insert(m.id());
    a.modes.push_back(std::move(ma));
  }
  a.assumption1 = positive_spanning && some_negative;
  a.assumption2 = negatives_are_majority;
  if (!a.assumption1) {
    a.warnings.push_back(positive_spanning ? "no mode contains a negative edge"
                                           : "no positive mode with a spanning tree rooted at the leader");
  }
  if (!a.assumption2) a.warnings.push_back("a mode with negative edges is not negative-majority");
  try {
    std::vector<AugmentedMode> modes(sc.modes.begin(), sc.modes.end());
    a.rho_bound = rho_upper_bound(sc.dyn, modes);
    a.rho_admissible = sc.rho < *a.rho_bound;
    if (!a.rho_admissible) {
      a.warnings.push_back("rho must be below " + std::to_string(*a.rho_bound) +
                           "; try " + std::to_string(suggest_rho(*a.rho_bound)));
    }
  } catch (const AssumptionViolation&) {
    a.rho_admissible = false;
  }
  return a;
}

EventTable build_event_table(const Scenario& sc) {
  EventTable table;
  const int p = sc.dyn.p();
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const RuleSpec& r = sc.events[i];
    TransitionRule t;
    t.mode_before = r.mode_before;
    t.mode_after = r.mode_after;
    t.joins = r.joins;
    t.leaves = r.leaves;
    t.phi_ind = r.phi_ind;
    if (r.xi_hat.matrix) {
      t.xi_hat = r.xi_hat.matrix;
    } else if (r.xi_hat.random_scale > 0.0) {
      std::mt19937_64 gen(derive_seed(derive_seed(sc.seed, seed_stream::xi_hat), i));
      t.xi_hat = uniform_matrix(p * sc.mode(r.mode_after).n_agents(), p * sc.mode(r.mode_before).n_agents(),
                                r.xi_hat.random_scale, gen);
    }
    table.push_back(std::move(t));
  }
  return table;
}

Certification certify(const Scenario& sc) {
  Certification c;
  c.analysis = analyze(sc);
  const Analysis& a = c.analysis;
  if (!a.assumption1) throw AssumptionViolation("Assumption 1 unmet: " + a.warnings.back());
  if (!a.assumption2) throw AssumptionViolation("Assumption 2 unmet: a mode with negative edges is not negative-majority");
  if (!a.rho_admissible) {
    throw AssumptionViolation("rho = " + std::to_string(sc.rho) + " is not below the admissible bound " +
                              (a.rho_bound ? std::to_string(*a.rho_bound) : std::string("(none)")));
  }
  if (a.stable.empty()) throw AssumptionViolation("no mode has a Hurwitz error matrix");

  const int p = sc.dyn.p();
  const auto sizes = sc.mode_sizes();
  c.table = build_event_table(sc);
  c.impulses = impulse_bounds(c.table, sizes, p);

  const std::vector<ModeMatrix> mms = a.mode_matrices();
  GammaPolicy policy = sc.certification.policy;
  std::optional<double> gamma_tilde = sc.certification.gamma_tilde;
  std::optional<double> fraction = sc.certification.gamma_fraction;
  if (sc.certification.calibration) {
    c.calibration = calibrate_margins(mms, a.stable, c.impulses.xi_breve_norm_max, *sc.certification.calibration);
    policy = c.calibration->policy(mms);
    policy.clamp_theta = sc.certification.policy.clamp_theta;
    gamma_tilde.reset();
    fraction = c.calibration->gamma_fraction;
  }

  std::vector<ModeCertificate> certs;
  for (const auto& mm : mms) {
    certs.push_back(solve_mode_certificate(mm, policy.margin_for(mm.mode_id, mm.alpha), policy.clamp_theta));
  }
  if (fraction) {
    const GammaAggregates agg = gamma_aggregates(certs, a.stable);
    gamma_tilde = *fraction * agg.gamma_bar_s;
  }
  c.bundle = assemble_constants(std::move(certs), c.impulses, sc.perturbation.bound(), sc.certification.n_hat,
                                a.stable, gamma_tilde);
  const SwitchingBudget budget = c.bundle.budget();

  if (sc.signal.generate) {
    SignalSpec spec;
    spec.t0 = sc.signal.t0;
    spec.horizon = sc.signal.tf - sc.signal.t0;
    spec.stable_modes.assign(a.stable.begin(), a.stable.end());
    spec.unstable_modes.assign(a.unstable.begin(), a.unstable.end());
    spec.ratio_lb = budget.ratio_lower_bound();
    spec.adt_lb = budget.adt_lower_bound();
    spec.seed = derive_seed(sc.seed, seed_stream::signal);
    spec.target_margin = sc.signal.generate->target_margin;
    c.signal = generate_signal(spec);
  } else {
    c.signal = SwitchingSignal(sc.signal.t0, sc.signal.tf, sc.signal.segments);
  }
  attach_events(c.signal, c.table, sizes, p, derive_seed(sc.seed, seed_stream::impulses));
  finalize_bound(c.bundle, c.signal);

  const bool vanishing = c.bundle.vartheta_bar == 0.0 && c.bundle.theta_bar == 0.0;
  const SuffixMode mode = sc.certification.suffixes.value_or(vanishing ? SuffixMode::First : SuffixMode::All);
  c.theorem1 = validate_theorem1(c.signal, budget, a.stable, mode);
  return c;
}

SwitchingSignal explicit_signal(const Scenario& sc) {
  if (sc.signal.generate) throw ConfigError("signal.generate needs the certified bounds; run certification first");
  SwitchingSignal sig(sc.signal.t0, sc.signal.tf, sc.signal.segments);
  attach_events(sig, build_event_table(sc), sc.mode_sizes(), sc.dyn.p(), derive_seed(sc.seed, seed_stream::impulses));
  return sig;
}

SimulationSetup build_setup(const Scenario& sc, const SwitchingSignal& signal) {
  SimulationSetup s;
  s.dyn = sc.dyn;
  s.rho = sc.rho;
  for (const auto& m : sc.modes) s.modes[m.id()] = m;
  s.signal = signal;
  s.perturbation = sc.perturbation;
  s.perturbation.seed = derive_seed(sc.seed, seed_stream::perturbation);
  s.perturbation.t_origin = sc.signal.t0;
  const int p = sc.dyn.p();
  const int n0 = sc.mode(s.signal.segments().front().mode).n_agents();
  if (sc.initial_state.values) {
    s.initial_state = *sc.initial_state.values;
  } else {
    std::mt19937_64 gen(derive_seed(sc.seed, seed_stream::initial_state));
    s.initial_state = uniform_matrix(p * (n0 + 1), 1, sc.initial_state.random_radius, gen).col(0);
  }
  return s;
}

}  // namespace omas

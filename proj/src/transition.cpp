#include "omas/transition.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "omas/errors.hpp"
#include "omas/random.hpp"

namespace omas {
namespace {

void check_positions(const std::vector<int>& pos, int limit, const char* what) {
  std::set<int> uniq;
  for (int i : pos) {
    if (i < 1 || i > limit) {
      throw ConfigError(std::string("migration event: ") + what + " position " +
                        std::to_string(i) + " outside 1.." + std::to_string(limit));
    }
    if (!uniq.insert(i).second) {
      throw ConfigError(std::string("migration event: duplicate ") + what + " position " +
                        std::to_string(i));
    }
  }
}

}  // namespace

void MigrationEvent::validate_positions() const {
  if (n_before <= 0 || n_after <= 0) {
    throw ConfigError("migration event: agent counts must be positive");
  }
  const int expect = n_before + static_cast<int>(joins.size()) - static_cast<int>(leaves.size());
  if (expect != n_after) {
    throw ConfigError("migration event " + std::to_string(mode_before) + "->" +
                      std::to_string(mode_after) + ": " + std::to_string(n_before) +
                      " agents + " + std::to_string(joins.size()) + " joins - " +
                      std::to_string(leaves.size()) + " leaves != " +
                      std::to_string(n_after));
  }
  check_positions(leaves, n_before, "leave");
  check_positions(joins, n_after, "join");
}

void MigrationEvent::validate(int p) const {
  validate_positions();
  if (phi_ind && phi_ind->size() != p * n_after) {
    throw ConfigError("migration event: phi_ind has length " +
                      std::to_string(phi_ind->size()) + ", expected " +
                      std::to_string(p * n_after));
  }
  if (xi_hat && (xi_hat->rows() != p * n_after || xi_hat->cols() != p * n_before)) {
    throw ConfigError("migration event: xi_hat shape mismatch, expected " +
                      std::to_string(p * n_after) + "x" + std::to_string(p * n_before));
  }
}

Matrix build_xi(const MigrationEvent& ev) {
  ev.validate_positions();
  std::vector<int> rows;  // surviving pre-jump agent index per post-jump row, -1 for joins
  const std::set<int> leaving(ev.leaves.begin(), ev.leaves.end());
  for (int i = 1; i <= ev.n_before; ++i) {
    if (!leaving.count(i)) rows.push_back(i - 1);
  }
  std::vector<int> joins = ev.joins;
  std::sort(joins.begin(), joins.end());
  for (int j : joins) rows.insert(rows.begin() + (j - 1), -1);

  Matrix xi = Matrix::Zero(ev.n_after, ev.n_before);
  for (int r = 0; r < ev.n_after; ++r) {
    if (rows[r] >= 0) xi(r, rows[r]) = 1.0;
  }
  return xi;
}

Matrix error_projection(int n_agents, int p) {
  Matrix base(n_agents, n_agents + 1);
  base.col(0).setConstant(-1.0);
  base.rightCols(n_agents).setIdentity();
  return kron(base, Matrix::Identity(p, p));
}

TransitionMap build_transition_map(const MigrationEvent& ev, int p) {
  ev.validate(p);
  TransitionMap tm;
  tm.p = p;
  tm.n_before = ev.n_before;
  tm.n_after = ev.n_after;
  tm.xi = build_xi(ev);

  const Matrix ip = Matrix::Identity(p, p);
  const Matrix xi_t = kron(tm.xi, ip);
  const int rows = p * (ev.n_after + 1);
  const int cols = p * (ev.n_before + 1);

  tm.xi_aug = Matrix::Zero(rows, cols);
  tm.xi_aug.topLeftCorner(p, p) = ip;
  tm.xi_aug.bottomRightCorner(p * ev.n_after, p * ev.n_before) = xi_t;

  const Matrix xi_hat =
      ev.xi_hat ? *ev.xi_hat : Matrix::Zero(p * ev.n_after, p * ev.n_before);
  tm.xi_breve_err = xi_t + xi_hat;

  // Leader-offset selectors: [-1, 0] (x) I_p for the post- and pre-jump sizes.
  Matrix upsilon_hat = Matrix::Zero(p * ev.n_after, cols);
  for (int i = 0; i < ev.n_after; ++i) upsilon_hat.block(i * p, 0, p, p) = -ip;
  Matrix upsilon_breve = Matrix::Zero(p * ev.n_before, cols);
  for (int i = 0; i < ev.n_before; ++i) upsilon_breve.block(i * p, 0, p, p) = -ip;

  tm.xi_breve_state = xi_hat * error_projection(ev.n_before, p) - upsilon_hat +
                      xi_t * upsilon_breve;
  return tm;
}

Vector apply_state_jump(const TransitionMap& tm, const Vector& xi_stacked,
                        const Vector& phi_ind) {
  const int p = tm.p;
  if (xi_stacked.size() != p * (tm.n_before + 1)) {
    throw ConfigError("state jump: state has length " + std::to_string(xi_stacked.size()) +
                      ", expected " + std::to_string(p * (tm.n_before + 1)));
  }
  Vector out = tm.xi_aug * xi_stacked;
  Vector impulse = tm.xi_breve_state * xi_stacked;
  if (phi_ind.size() != 0) {
    if (phi_ind.size() != impulse.size()) throw ConfigError("state jump: phi_ind length mismatch");
    impulse += phi_ind;
  }
  out.tail(p * tm.n_after) += impulse;
  return out;
}

Vector apply_error_jump(const TransitionMap& tm, const Vector& err, const Vector& phi_ind) {
  if (err.size() != tm.xi_breve_err.cols()) {
    throw ConfigError("error jump: error has length " + std::to_string(err.size()) +
                      ", expected " + std::to_string(tm.xi_breve_err.cols()));
  }
  Vector out = tm.xi_breve_err * err;
  if (phi_ind.size() != 0) {
    if (phi_ind.size() != out.size()) throw ConfigError("error jump: phi_ind length mismatch");
    out += phi_ind;
  }
  return out;
}

ImpulseBounds impulse_bounds(const std::vector<MigrationEvent>& events, int p) {
  ImpulseBounds b;
  std::set<std::pair<int, int>> pairs;
  for (const auto& ev : events) {
    if (ev.phi_ind) b.phi_bar = std::max(b.phi_bar, ev.phi_ind->norm());
    if (!pairs.emplace(ev.mode_after, ev.mode_before).second) continue;
    const TransitionMap tm = build_transition_map(ev, p);
    b.xi_breve_norm_max = std::max(b.xi_breve_norm_max, norm2(tm.xi_breve_err));
  }
  return b;
}

double ImpulseSpec::bound() const {
  if (vector) return vector->norm();
  return sphere_radius;
}

namespace {

int size_of(const std::map<int, int>& sizes, int mode) {
  auto it = sizes.find(mode);
  if (it == sizes.end()) throw ConfigError("unknown mode id " + std::to_string(mode));
  return it->second;
}

const TransitionRule* find_rule(const EventTable& table, int before, int after) {
  for (const auto& r : table) {
    if (r.mode_before == before && r.mode_after == after) return &r;
  }
  return nullptr;
}

}  // namespace

MigrationEvent instantiate_event(const EventTable& table, int k, int mode_before,
                                 int mode_after, const std::map<int, int>& mode_sizes, int p,
                                 std::uint64_t seed) {
  MigrationEvent ev;
  ev.time_index = k;
  ev.mode_before = mode_before;
  ev.mode_after = mode_after;
  ev.n_before = size_of(mode_sizes, mode_before);
  ev.n_after = size_of(mode_sizes, mode_after);
  const TransitionRule* rule = find_rule(table, mode_before, mode_after);
  if (!rule) {
    if (ev.n_before != ev.n_after) {
      throw ConfigError("no transition rule for switch " + std::to_string(mode_before) + "->" +
                        std::to_string(mode_after) + " and the agent count changes");
    }
    ev.validate(p);
    return ev;
  }
  ev.joins = rule->joins;
  ev.leaves = rule->leaves;
  ev.xi_hat = rule->xi_hat;
  if (rule->phi_ind.vector) {
    ev.phi_ind = rule->phi_ind.vector;
  } else if (rule->phi_ind.sphere_radius > 0.0) {
    std::mt19937_64 gen(derive_seed(seed, static_cast<std::uint64_t>(k)));
    ev.phi_ind = uniform_on_sphere(p * ev.n_after, rule->phi_ind.sphere_radius, gen);
  }
  ev.validate(p);
  return ev;
}

ImpulseBounds impulse_bounds(const EventTable& table, const std::map<int, int>& mode_sizes,
                             int p) {
  std::vector<MigrationEvent> events;
  ImpulseBounds b;
  for (const auto& rule : table) {
    MigrationEvent ev;
    ev.mode_before = rule.mode_before;
    ev.mode_after = rule.mode_after;
    ev.n_before = size_of(mode_sizes, rule.mode_before);
    ev.n_after = size_of(mode_sizes, rule.mode_after);
    ev.joins = rule.joins;
    ev.leaves = rule.leaves;
    ev.xi_hat = rule.xi_hat;
    events.push_back(std::move(ev));
    b.phi_bar = std::max(b.phi_bar, rule.phi_ind.bound());
  }
  b.xi_breve_norm_max = impulse_bounds(events, p).xi_breve_norm_max;
  return b;
}

}  // namespace omas

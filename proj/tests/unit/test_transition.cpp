#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "omas/errors.hpp"
#include "omas/random.hpp"
#include "omas/transition.hpp"

using namespace omas;

namespace {

MigrationEvent make(int nb, int na, std::vector<int> joins, std::vector<int> leaves) {
  MigrationEvent ev;
  ev.mode_before = 1;
  ev.mode_after = 2;
  ev.n_before = nb;
  ev.n_after = na;
  ev.joins = std::move(joins);
  ev.leaves = std::move(leaves);
  return ev;
}

}  // namespace

TEST(Transition, XiForFixtureMigrations) {
  // Selection matrices of the example's size changes.
  Matrix xi21(3, 4);
  xi21 << 1, 0, 0, 0,
          0, 0, 1, 0,
          0, 0, 0, 1;
  EXPECT_EQ(build_xi(make(4, 3, {}, {2})), xi21);
  Matrix xi32 = Matrix::Zero(5, 3);
  xi32(0, 0) = 1;
  xi32(2, 1) = 1;
  xi32(3, 2) = 1;
  EXPECT_EQ(build_xi(make(3, 5, {2, 5}, {})), xi32);
  Matrix xi23 = Matrix::Zero(3, 5);
  xi23(0, 0) = 1;
  xi23(1, 1) = 1;
  xi23(2, 4) = 1;
  EXPECT_EQ(build_xi(make(5, 3, {}, {3, 4})), xi23);
  Matrix xi14 = Matrix::Zero(4, 3);
  xi14(0, 0) = 1;
  xi14(1, 1) = 1;
  xi14(3, 2) = 1;
  EXPECT_EQ(build_xi(make(3, 4, {3}, {})), xi14);
}

TEST(Transition, LeavesApplyBeforeJoins) {
  // Agent 1 leaves, then a newcomer takes position 1 of the result.
  Matrix expected = Matrix::Zero(3, 3);
  expected(1, 1) = 1;
  expected(2, 2) = 1;
  EXPECT_EQ(build_xi(make(3, 3, {1}, {1})), expected);
}

TEST(Transition, RejectsInconsistentCounts) {
  EXPECT_THROW(build_xi(make(3, 3, {}, {1})), ConfigError);
  EXPECT_THROW(build_xi(make(3, 2, {}, {4})), ConfigError);
  EXPECT_THROW(build_xi(make(3, 2, {}, {1, 1})), ConfigError);
}

TEST(Transition, JumpIdentityAndLeaderImmunity) {
  std::mt19937_64 gen(3);
  const int p = 2;
  MigrationEvent ev = make(4, 5, {2, 5}, {3});
  ev.n_after = 5;
  ev.joins = {2, 5};
  ev.leaves = {3};
  ev.xi_hat = uniform_matrix(p * 5, p * 4, 0.1, gen);
  ev.phi_ind = uniform_on_sphere(p * 5, 0.5, gen);
  const TransitionMap tm = build_transition_map(ev, p);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector xi = uniform_matrix(p * 5, 1, 1.0, gen).col(0);
    const Vector post = apply_state_jump(tm, xi, *ev.phi_ind);
    EXPECT_EQ(post.head(p), xi.head(p));
    const Vector lhs = error_projection(5, p) * post;
    const Vector rhs = tm.xi_breve_err * (error_projection(4, p) * xi) + *ev.phi_ind;
    EXPECT_NEAR((lhs - rhs).norm(), 0.0, 1e-12);
    EXPECT_NEAR((apply_error_jump(tm, error_projection(4, p) * xi, *ev.phi_ind) - lhs).norm(), 0.0, 1e-12);
  }
}

TEST(Transition, JoinerStartsAtLeaderWithoutImpulse) {
  const int p = 2;
  const TransitionMap tm = build_transition_map(make(1, 2, {2}, {}), p);
  Vector xi(4);
  xi << 0.3, -0.7, 1.0, 2.0;
  const Vector post = apply_state_jump(tm, xi);
  EXPECT_EQ(post.segment(4, 2), xi.head(2));
  EXPECT_EQ(post.segment(2, 2), xi.segment(2, 2));
}

TEST(Transition, ImpulseBoundsOverTable) {
  EventTable table;
  TransitionRule r;
  r.mode_before = 1;
  r.mode_after = 2;
  r.leaves = {1};
  r.phi_ind.sphere_radius = 0.53;
  table.push_back(r);
  const std::map<int, int> sizes{{1, 2}, {2, 1}};
  const ImpulseBounds b = impulse_bounds(table, sizes, 2);
  EXPECT_DOUBLE_EQ(b.phi_bar, 0.53);
  EXPECT_NEAR(b.xi_breve_norm_max, 1.0, 1e-12);
  const MigrationEvent ev = instantiate_event(table, 1, 1, 2, sizes, 2, 99);
  ASSERT_TRUE(ev.phi_ind.has_value());
  EXPECT_NEAR(ev.phi_ind->norm(), 0.53, 1e-12);
  EXPECT_EQ(*instantiate_event(table, 1, 1, 2, sizes, 2, 99).phi_ind, *ev.phi_ind);
  EXPECT_THROW(instantiate_event(table, 1, 2, 1, sizes, 2, 99), ConfigError);
}

TEST(Transition, SelectionStructure) {
  const Matrix xi = build_xi(make(5, 4, {1, 4}, {2, 3, 5}));
  EXPECT_TRUE((xi.array() == 0.0 || xi.array() == 1.0).all());
  const Matrix g = xi * xi.transpose();
  EXPECT_TRUE((g - Matrix(g.diagonal().asDiagonal())).isZero(0.0));
  EXPECT_EQ(Eigen::FullPivLU<Matrix>(xi).rank(), 5 - 3);
  EXPECT_LE(norm2(xi), 1.0 + 1e-12);
}

TEST(Transition, IdentityEventIsIdentity) {
  const TransitionMap tm = build_transition_map(make(3, 3, {}, {}), 2);
  std::mt19937_64 gen(4);
  const Vector xi = uniform_matrix(8, 1, 1.0, gen).col(0);
  EXPECT_EQ(apply_state_jump(tm, xi), xi);
}

TEST(Transition, ConsensusSurvivesMigration) {
  std::mt19937_64 gen(9);
  MigrationEvent ev = make(3, 4, {2}, {});
  ev.xi_hat = uniform_matrix(8, 6, 0.3, gen);
  const TransitionMap tm = build_transition_map(ev, 2);
  Vector xi(8);
  xi << 0.4, -1.2, 0.4, -1.2, 0.4, -1.2, 0.4, -1.2;  // every agent on the leader
  EXPECT_LE((error_projection(4, 2) * apply_state_jump(tm, xi)).norm(), 1e-14);
}

TEST(Transition, RandomJumpConsistency) {
  std::mt19937_64 gen(13);
  std::uniform_int_distribution<int> size(1, 6);
  const int p = 2;
  for (int trial = 0; trial < 200; ++trial) {
    const int nb = size(gen);
    std::vector<int> pos(nb);
    std::iota(pos.begin(), pos.end(), 1);
    std::shuffle(pos.begin(), pos.end(), gen);
    const int n_leave = std::uniform_int_distribution<int>(0, nb - 1)(gen);
    std::vector<int> leaves(pos.begin(), pos.begin() + n_leave);
    std::sort(leaves.begin(), leaves.end());
    const int n_join = std::uniform_int_distribution<int>(0, 3)(gen);
    const int na = nb - n_leave + n_join;
    std::vector<int> slots(na);
    std::iota(slots.begin(), slots.end(), 1);
    std::shuffle(slots.begin(), slots.end(), gen);
    std::vector<int> joins(slots.begin(), slots.begin() + n_join);
    std::sort(joins.begin(), joins.end());
    MigrationEvent ev = make(nb, na, joins, leaves);
    ev.xi_hat = uniform_matrix(p * na, p * nb, 0.2, gen);
    ev.phi_ind = uniform_on_sphere(p * na, 0.53, gen);
    const TransitionMap tm = build_transition_map(ev, p);
    const Vector xi = uniform_matrix(p * (nb + 1), 1, 2.0, gen).col(0);
    const Vector lhs = error_projection(na, p) * apply_state_jump(tm, xi, *ev.phi_ind);
    const Vector rhs = tm.xi_breve_err * (error_projection(nb, p) * xi) + *ev.phi_ind;
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * (1 + xi.norm()));
  }
}

#include "omas/signed_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "omas/errors.hpp"

namespace omas {

SignedDigraph::SignedDigraph(int n_agents, std::vector<SignedEdge> edges)
    : n_(n_agents), edges_(std::move(edges)) {
  if (n_ <= 0) throw ConfigError("signed digraph: n_agents must be positive");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges_) {
    if (e.from < 1 || e.from > n_ || e.to < 1 || e.to > n_) {
      throw ConfigError("signed digraph: edge " + std::to_string(e.from) + "->" +
                        std::to_string(e.to) + " out of range 1.." +
                        std::to_string(n_));
    }
    if (e.from == e.to) {
      throw ConfigError("signed digraph: self-loop at agent " + std::to_string(e.from));
    }
    if (e.weight == 0.0 || !std::isfinite(e.weight)) {
      throw ConfigError("signed digraph: edge weight must be finite and nonzero");
    }
    if (!seen.emplace(e.from, e.to).second) {
      throw ConfigError("signed digraph: duplicate edge " + std::to_string(e.from) +
                        "->" + std::to_string(e.to));
    }
  }
}

SignedDigraph SignedDigraph::from_laplacian(const Matrix& laplacian) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() == 0) {
    throw ConfigError("laplacian must be a nonempty square matrix");
  }
  const int n = static_cast<int>(laplacian.rows());
  std::vector<SignedEdge> edges;
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double a = -laplacian(i, j);
      row_sum += a;
      if (a != 0.0) edges.push_back({j + 1, i + 1, a});
    }
    if (std::abs(row_sum - laplacian(i, i)) > 1e-12 * std::max(1.0, std::abs(row_sum))) {
      throw ConfigError("laplacian row " + std::to_string(i + 1) +
                        ": diagonal does not equal the adjacency row sum");
    }
  }
  return SignedDigraph(n, std::move(edges));
}

Matrix SignedDigraph::adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (const auto& e : edges_) a(e.to - 1, e.from - 1) = e.weight;
  return a;
}

AugmentedMode::AugmentedMode(int id, SignedDigraph graph, Vector leader_links)
    : id_(id), graph_(std::move(graph)), leader_links_(std::move(leader_links)) {
  if (leader_links_.size() != graph_.n_agents()) {
    throw ConfigError("mode " + std::to_string(id_) + ": leader_links has length " +
                      std::to_string(leader_links_.size()) + ", expected " +
                      std::to_string(graph_.n_agents()));
  }
  if (!leader_links_.allFinite()) {
    throw ConfigError("mode " + std::to_string(id_) + ": leader_links not finite");
  }
}

std::string to_string(ModeClass c) {
  switch (c) {
    case ModeClass::PositiveSpanning: return "PositiveSpanning";
    case ModeClass::PositiveNoSpanning: return "PositiveNoSpanning";
    case ModeClass::NegativeMajority: return "NegativeMajority";
    case ModeClass::NegativeMinority: return "NegativeMinority";
  }
  return "?";
}

Matrix repelling_laplacian(const SignedDigraph& g) {
  const Matrix a = g.adjacency();
  Matrix l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

Matrix z_matrix(const AugmentedMode& m) {
  Matrix z = repelling_laplacian(m.graph());
  z.diagonal() += m.leader_links();
  return z;
}

Matrix augmented_laplacian(const AugmentedMode& m) {
  const int n = m.n_agents();
  Matrix lt = Matrix::Zero(n + 1, n + 1);
  lt.block(1, 0, n, 1) = -m.leader_links();
  lt.block(1, 1, n, n) = z_matrix(m);
  return lt;
}

EdgeCensus edge_census(const AugmentedMode& m) {
  EdgeCensus c;
  auto count = [&c](double w) {
    if (w > 0.0) ++c.positive;
    if (w < 0.0) ++c.negative;
    if (w != 0.0 && std::abs(w) != 1.0) c.unit_weights = false;
    c.offdiag_sum -= w;
  };
  for (const auto& e : m.graph().edges()) count(e.weight);
  for (Eigen::Index i = 0; i < m.leader_links().size(); ++i) count(m.leader_links()[i]);
  return c;
}

bool leader_spans(const AugmentedMode& m) {
  const int n = m.n_agents();
  std::vector<std::vector<int>> out(n + 1);
  for (int i = 1; i <= n; ++i) {
    if (m.leader_links()[i - 1] != 0.0) out[0].push_back(i);
  }
  for (const auto& e : m.graph().edges()) out[e.from].push_back(e.to);

  std::vector<char> seen(n + 1, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : out[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

ModeClass classify_mode(const AugmentedMode& m) {
  const EdgeCensus c = edge_census(m);
  if (c.negative == 0) {
    return leader_spans(m) ? ModeClass::PositiveSpanning : ModeClass::PositiveNoSpanning;
  }
  const bool majority =
      c.unit_weights ? (c.negative > c.positive) : (c.offdiag_sum > 0.0);
  return majority ? ModeClass::NegativeMajority : ModeClass::NegativeMinority;
}

bool negative_majority_definitions_agree(const AugmentedMode& m) {
  const EdgeCensus c = edge_census(m);
  if (c.negative == 0) return true;
  return (c.negative > c.positive) == (c.offdiag_sum > 0.0);
}

InstabilityReport check_negative_majority_instability(const AugmentedMode& m,
                                                      double threshold) {
  InstabilityReport r;
  const Matrix lt = augmented_laplacian(m);
  const Matrix z = lt.bottomRightCorner(m.n_agents(), m.n_agents());
  r.trace_ltilde = lt.trace();
  r.trace_z = z.trace();
  auto min_re = [](const Matrix& x) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues(x)) lo = std::min(lo, l.real());
    return lo;
  };
  r.min_re_ltilde = min_re(lt);
  r.min_re_z = min_re(z);
  r.has_negative_eig_ltilde = r.min_re_ltilde < -threshold;
  r.has_negative_eig_z = r.min_re_z < -threshold;
  return r;
}

AugmentedMode relabel(const AugmentedMode& m, const std::vector<int>& perm) {
  const int n = m.n_agents();
  if (static_cast<int>(perm.size()) != n) throw ConfigError("relabel: bad permutation size");
  std::vector<SignedEdge> edges;
  for (const auto& e : m.graph().edges()) {
    edges.push_back({perm[e.from - 1], perm[e.to - 1], e.weight});
  }
  Vector d(n);
  for (int i = 0; i < n; ++i) d[perm[i] - 1] = m.leader_links()[i];
  return AugmentedMode(m.id(), SignedDigraph(n, std::move(edges)), d);
}

}  // namespace omas

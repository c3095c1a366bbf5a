#pragma once

#include <string>
#include <vector>

#include "omas/spectrum.hpp"

namespace omas {

/// Directed edge from agent `from` to agent `to` (1-based ids). The weight
/// carries the sign; the +-1 case is the unweighted signed digraph.
struct SignedEdge {
  int from = 0;
  int to = 0;
  double weight = 1.0;
};

/// Signed digraph over agents 1..n_agents. Validated on construction:
/// no self-loops, at most one edge per ordered pair, ids in range, nonzero weights.
class SignedDigraph {
 public:
  SignedDigraph() = default;
  SignedDigraph(int n_agents, std::vector<SignedEdge> edges);

  /// Inverse of repelling_laplacian(): a_ij = -l_ij off the diagonal. The
  /// diagonal must equal the row sum of the recovered adjacency.
  static SignedDigraph from_laplacian(const Matrix& laplacian);

  int n_agents() const { return n_; }
  const std::vector<SignedEdge>& edges() const { return edges_; }

  /// a_ij (i receives from j), 0-based indices.
  Matrix adjacency() const;

 private:
  int n_ = 0;
  std::vector<SignedEdge> edges_;
};

/// A topology mode: the agent digraph plus the leader's outgoing links
/// d_i (entry i-1 is the link 0 -> i). The leader never receives edges.
class AugmentedMode {
 public:
  AugmentedMode() = default;
  AugmentedMode(int id, SignedDigraph graph, Vector leader_links);

  int id() const { return id_; }
  int n_agents() const { return graph_.n_agents(); }
  const SignedDigraph& graph() const { return graph_; }
  const Vector& leader_links() const { return leader_links_; }

 private:
  int id_ = 0;
  SignedDigraph graph_;
  Vector leader_links_;
};

enum class ModeClass {
  PositiveSpanning,
  PositiveNoSpanning,
  NegativeMajority,
  NegativeMinority,
};

std::string to_string(ModeClass c);

/// L with l_ij = -a_ij (i != j) and l_ii = sum_j a_ij.
Matrix repelling_laplacian(const SignedDigraph& g);

/// Z = L + diag(d).
Matrix z_matrix(const AugmentedMode& m);

/// [0, 0^T; -d, Z], the repelling Laplacian of the graph including the leader node 0.
Matrix augmented_laplacian(const AugmentedMode& m);

struct EdgeCensus {
  int positive = 0;  // including leader links
  int negative = 0;
  double offdiag_sum = 0.0;  // sum_{i != j} of the augmented Laplacian entries
  bool unit_weights = true;
};

EdgeCensus edge_census(const AugmentedMode& m);

/// True when every agent is reachable from the leader along directed edges.
bool leader_spans(const AugmentedMode& m);

ModeClass classify_mode(const AugmentedMode& m);

/// For weighted graphs the "more negative than positive edges" test by count
/// and by the sign of the augmented off-diagonal sum can disagree.
bool negative_majority_definitions_agree(const AugmentedMode& m);

struct InstabilityReport {
  double trace_ltilde = 0.0;
  double trace_z = 0.0;
  double min_re_ltilde = 0.0;
  double min_re_z = 0.0;
  bool has_negative_eig_ltilde = false;
  bool has_negative_eig_z = false;

  bool holds() const {
    return trace_ltilde < 0.0 && trace_z < 0.0 && has_negative_eig_ltilde &&
           has_negative_eig_z;
  }
};

/// Negative-majority modes must have negative traces and an eigenvalue with
/// Re < -threshold in both the augmented Laplacian and Z. Reports, never throws.
InstabilityReport check_negative_majority_instability(const AugmentedMode& m,
                                                      double threshold = 1e-10);

/// The same mode with agents renumbered: new id of old agent i is perm[i-1].
AugmentedMode relabel(const AugmentedMode& m, const std::vector<int>& perm);

}  // namespace omas

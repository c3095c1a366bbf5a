#include "omas/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "omas/errors.hpp"

namespace omas {
namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void average_clusters(std::vector<Complex>& values, double tol) {
  const int n = static_cast<int>(values.size());
  if (tol <= 0.0 || n < 2) return;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) < tol) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }
  std::vector<Complex> sum(n, Complex(0.0, 0.0));
  std::vector<int> count(n, 0);
  for (int i = 0; i < n; ++i) {
    const int r = find_root(parent, i);
    sum[r] += values[i];
    ++count[r];
  }
  for (int i = 0; i < n; ++i) {
    const int r = find_root(parent, i);
    values[i] = sum[r] / static_cast<double>(count[r]);
  }
}

double scale_of(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  return std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
}

}  // namespace

std::vector<Complex> eigenvalues(const Matrix& m, double cluster_tol,
                                 const char* context) {
  if (m.rows() != m.cols()) {
    throw ConfigError("eigenvalues: matrix is not square");
  }
  std::vector<Complex> out;
  if (m.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError(std::string("eigensolver did not converge") +
                       (context ? std::string(" for ") + context : std::string()));
  }
  const auto& ev = solver.eigenvalues();
  out.reserve(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) out.push_back(ev[i]);
  average_clusters(out, cluster_tol * scale_of(m));
  return out;
}

double spectral_abscissa(const Matrix& m, const char* context) {
  const auto ev = eigenvalues(m, 1e-4, context);
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& l : ev) a = std::max(a, l.real());
  return a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kronecker_sum(const Matrix& f, const Matrix& g) {
  return kron(f, Matrix::Identity(g.rows(), g.rows())) +
         kron(Matrix::Identity(f.rows(), f.rows()), g);
}

KroneckerCheck kronecker_spectrum_check(const Matrix& f, const Matrix& g,
                                        double tol) {
  const Matrix y = kronecker_sum(f, g);
  const auto direct = eigenvalues(y, 1e-4, "kronecker sum");
  const auto lf = eigenvalues(f, 1e-4, "F");
  const auto lg = eigenvalues(g, 1e-4, "G");

  std::vector<Complex> sums;
  sums.reserve(lf.size() * lg.size());
  for (const auto& a : lf) {
    for (const auto& b : lg) sums.push_back(a + b);
  }
  average_clusters(sums, 1e-4 * scale_of(y));

  KroneckerCheck result;
  if (sums.size() != direct.size()) return result;
  const int n = static_cast<int>(sums.size());
  if (n == 0) {
    result.matches = true;
    return result;
  }
  Matrix cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost(i, j) = std::abs(direct[i] - sums[j]);
  }
  const auto assign = min_cost_assignment(cost);
  for (int i = 0; i < n; ++i) {
    result.max_deviation = std::max(result.max_deviation, cost(i, assign[i]));
  }
  result.matches = result.max_deviation <= tol;
  return result;
}

std::vector<int> min_cost_assignment(const Matrix& cost) {
  // Potentials-based Hungarian method, 1-indexed internally.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ConfigError("min_cost_assignment: cost must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace omas

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace omas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Eigenvalues of a general real square matrix.
///
/// A defective eigenvalue of multiplicity k is returned by any backward-stable
/// solver as a ring of k values with radius ~ (eps*|M|)^(1/k), while the
/// arithmetic mean of that ring stays accurate to O(eps). Eigenvalues closer
/// than `cluster_tol * max(1, |M|)` are therefore grouped (single linkage)
/// and each member is replaced by the group mean. Pass cluster_tol = 0 to get
/// the raw solver output.
std::vector<Complex> eigenvalues(const Matrix& m, double cluster_tol = 1e-4,
                                 const char* context = nullptr);

/// max_i Re(lambda_i(m)), computed from the refined spectrum above.
double spectral_abscissa(const Matrix& m, const char* context = nullptr);

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Kronecker sum f (x) I_r + I_n (x) g.
Matrix kronecker_sum(const Matrix& f, const Matrix& g);

struct KroneckerCheck {
  bool matches = false;
  double max_deviation = 0.0;
};

/// Compares the spectrum of f (x) I + I (x) g with all pairwise sums
/// lambda_f + lambda_g after an optimal one-to-one matching.
KroneckerCheck kronecker_spectrum_check(const Matrix& f, const Matrix& g,
                                        double tol = 1e-8);

/// Optimal assignment for a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<int> min_cost_assignment(const Matrix& cost);

/// Largest singular value.
double norm2(const Matrix& m);

}  // namespace omas

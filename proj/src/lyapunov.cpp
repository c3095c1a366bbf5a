#include "omas/lyapunov.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "omas/errors.hpp"

namespace omas {

Matrix solve_continuous_lyapunov(const Matrix& s, const Matrix& c) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n || c.rows() != n || c.cols() != n) {
    throw ConfigError("lyapunov: shape mismatch");
  }
  if (n == 0) return Matrix();
  using CMatrix = Eigen::MatrixXcd;

  Eigen::ComplexSchur<Matrix> schur(s);
  if (schur.info() != Eigen::Success) throw NumericError("lyapunov: Schur decomposition failed");
  const CMatrix& u = schur.matrixU();
  const CMatrix& t = schur.matrixT();

  // S^T = U T^H U^H for real S, so with Y = U^H X U the equation becomes
  // T^H Y + Y T = U^H C U, solvable entry by entry in row-major order.
  const CMatrix f = u.adjoint() * c.cast<std::complex<double>>() * u;
  CMatrix y = CMatrix::Zero(n, n);
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      std::complex<double> rhs = f(i, j);
      for (Eigen::Index k = 0; k < i; ++k) rhs -= std::conj(t(k, i)) * y(k, j);
      for (Eigen::Index k = 0; k < j; ++k) rhs -= y(i, k) * t(k, j);
      const std::complex<double> denom = std::conj(t(i, i)) + t(j, j);
      if (std::abs(denom) < 1e-14 * scale) {
        throw NumericError("lyapunov: eigenvalues sum to zero, equation is singular");
      }
      y(i, j) = rhs / denom;
    }
  }
  Matrix x = (u * y * u.adjoint()).real();
  if ((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0) x = (0.5 * (x + x.transpose())).eval();
  return x;
}

}  // namespace omas

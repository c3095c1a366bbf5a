#include <random>

#include <gtest/gtest.h>

#include "omas/errors.hpp"
#include "omas/lyapunov.hpp"
#include "omas/random.hpp"

using namespace omas;

namespace {

// Oracle: vec(S^T X + X S) = (I (x) S^T + S^T (x) I) vec(X), solved densely.
Matrix vectorized_solve(const Matrix& s, const Matrix& c) {
  const Eigen::Index n = s.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix k = kron(id, s.transpose()) + kron(s.transpose(), id);
  const Vector x = k.fullPivLu().solve(Eigen::Map<const Vector>(c.data(), n * n));
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

}  // namespace

TEST(Lyapunov, MatchesVectorizedOracle) {
  std::mt19937_64 gen(5);
  for (int n = 1; n <= 8; ++n) {
    Matrix s = uniform_matrix(n, n, 1.0, gen);
    s -= (spectral_abscissa(s) + 0.5) * Matrix::Identity(n, n);
    const Matrix c = -Matrix::Identity(n, n);
    const Matrix x = solve_continuous_lyapunov(s, c);
    const Matrix oracle = vectorized_solve(s, c);
    EXPECT_LE((x - oracle).norm(), 1e-10 * oracle.norm()) << "n = " << n;
    EXPECT_LE((s.transpose() * x + x * s - c).norm(), 1e-10 * x.norm());
    EXPECT_EQ(x, x.transpose());
  }
}

TEST(Lyapunov, NonSymmetricRightHandSide) {
  std::mt19937_64 gen(6);
  Matrix s = uniform_matrix(4, 4, 1.0, gen) - 3.0 * Matrix::Identity(4, 4);
  const Matrix c = uniform_matrix(4, 4, 1.0, gen);
  const Matrix x = solve_continuous_lyapunov(s, c);
  EXPECT_LE((x - vectorized_solve(s, c)).norm(), 1e-10);
}

TEST(Lyapunov, SingularOperatorThrows) {
  Matrix s(2, 2);
  s << 1, 0,
       0, -1;  // eigenvalues sum to zero
  EXPECT_THROW(solve_continuous_lyapunov(s, -Matrix::Identity(2, 2)), NumericError);
}

#include <random>

#include <gtest/gtest.h>

#include "omas/random.hpp"
#include "omas/spectrum.hpp"

using namespace omas;

TEST(Spectrum, DefectiveEigenvalueRecoveredByClusterMean) {
  // Jordan block of size 3 at 1, hidden by a similarity transform.
  Matrix j(3, 3);
  j << 1, 1, 0,
       0, 1, 1,
       0, 0, 1;
  Matrix s(3, 3);
  s << 2, 1, 0,
       1, 3, 1,
       0, 1, 4;
  const Matrix m = s * j * s.inverse();
  for (const auto& z : eigenvalues(m)) {
    EXPECT_NEAR(z.real(), 1.0, 1e-12);
    EXPECT_NEAR(z.imag(), 0.0, 1e-12);
  }
}

TEST(Spectrum, RawSolverIsOnlyCubeRootAccurate) {
  Matrix j(3, 3);
  j << 1, 1, 0,
       0, 1, 1,
       0, 0, 1;
  double worst = 0.0;
  for (const auto& z : eigenvalues(j + 1e-12 * Matrix::Ones(3, 3), 0.0)) worst = std::max(worst, std::abs(z - 1.0));
  EXPECT_GT(worst, 1e-6);
}

TEST(Spectrum, KronMatchesDefinition) {
  Matrix a(2, 2), b(2, 1);
  a << 1, 2,
       3, 4;
  b << 5,
       6;
  Matrix expected(4, 2);
  expected << 5, 10,
              6, 12,
              15, 20,
              18, 24;
  EXPECT_EQ(kron(a, b), expected);
}

TEST(Spectrum, KroneckerSumSpectrum) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix f = uniform_matrix(3, 3, 1.0, gen);
    const Matrix g = uniform_matrix(4, 4, 1.0, gen);
    const KroneckerCheck kc = kronecker_spectrum_check(f, g);
    EXPECT_TRUE(kc.matches);
    EXPECT_LE(kc.max_deviation, 1e-9);
  }
}

TEST(Spectrum, AssignmentIsOptimal) {
  Matrix c(3, 3);
  c << 4, 1, 3,
       2, 0, 5,
       3, 2, 2;
  const auto a = min_cost_assignment(c);
  double cost = 0.0;
  for (int i = 0; i < 3; ++i) cost += c(i, a[i]);
  EXPECT_DOUBLE_EQ(cost, 5.0);
}

TEST(Spectrum, Norm2) {
  Matrix m(2, 2);
  m << 3, 0,
       4, 5;
  EXPECT_NEAR(norm2(m), std::sqrt(45.0), 1e-12);
}

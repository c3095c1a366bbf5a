#pragma once

#include "omas/spectrum.hpp"

namespace omas {

/// Solves S^T X + X S = C for X by the Bartels-Stewart method on the complex
/// Schur form of S. Unique when no two eigenvalues of S sum to zero (e.g. S
/// Hurwitz). The result is symmetrized when C is symmetric.
Matrix solve_continuous_lyapunov(const Matrix& s, const Matrix& c);

}  // namespace omas

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "omas/spectrum.hpp"

namespace omas {

enum class IntegratorKind { Exact, Rk4 };

std::string to_string(IntegratorKind k);
IntegratorKind integrator_kind_from_string(const std::string& s);

/// f(t, left_limit) -> forcing. An empty function means no forcing.
using Forcing = std::function<Vector(double, bool)>;

struct SegmentSamples {
  std::vector<double> t;
  std::vector<Vector> x;
  bool diverged = false;
  double blowup_time = 0.0;
};

/// Integrates x' = m x + f(t) on [t_begin, t_end] with ceil(len/dt) equal steps.
///  - Exact: step propagator exp(m h) and the exact response to f linearly
///    interpolated between f(t_n) and f(t_{n+1}-).
///  - Rk4: classical fourth-order Runge-Kutta.
/// Points in `breakpoints` (forcing discontinuities) are added to the grid;
/// each piece between them is split into ceil(len/dt) equal steps.
/// Keeps every `stride`-th grid point plus both endpoints.
SegmentSamples integrate_segment(const Matrix& m, const Vector& x0, const Forcing& f,
                                 double t_begin, double t_end, double dt, IntegratorKind kind,
                                 int stride = 1, const std::vector<double>& breakpoints = {});

}  // namespace omas

#include "omas/integrator.hpp"

#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

#include "omas/errors.hpp"

namespace omas {

std::string to_string(IntegratorKind k) {
  return k == IntegratorKind::Exact ? "exact" : "rk4";
}

IntegratorKind integrator_kind_from_string(const std::string& s) {
  if (s == "exact") return IntegratorKind::Exact;
  if (s == "rk4") return IntegratorKind::Rk4;
  throw ConfigError("unknown integrator '" + s + "' (expected exact|rk4)");
}

namespace {

constexpr double kBlowup = 1e150;

bool blown_up(const Vector& x) { return !x.allFinite() || x.norm() > kBlowup; }

struct StepOperators {
  Matrix phi, gamma0, gamma1;
};

// exp of [[m, I, 0], [0, 0, I], [0, 0, 0]] * h gives the free response and
// the responses to a constant and to a unit-slope ramp input over one step.
StepOperators exact_operators(const Matrix& m, double h) {
  const Eigen::Index n = m.rows();
  Matrix aug = Matrix::Zero(3 * n, 3 * n);
  aug.topLeftCorner(n, n) = m;
  aug.block(0, n, n, n).setIdentity();
  aug.block(n, 2 * n, n, n).setIdentity();
  const Matrix e = (aug * h).exp();
  return {e.topLeftCorner(n, n), e.block(0, n, n, n), e.block(0, 2 * n, n, n)};
}

}  // namespace

SegmentSamples integrate_segment(const Matrix& m, const Vector& x0, const Forcing& f,
                                 double t_begin, double t_end, double dt, IntegratorKind kind,
                                 int stride, const std::vector<double>& breakpoints) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || x0.size() != n) throw ConfigError("integrate_segment: dimension mismatch");
  if (!(t_end >= t_begin)) throw ConfigError("integrate_segment: empty time span");
  if (!(dt > 0.0)) throw ConfigError("integrate_segment: dt must be positive");
  if (stride < 1) stride = 1;

  SegmentSamples out;
  out.t.push_back(t_begin);
  out.x.push_back(x0);
  if (t_end == t_begin) return out;

  std::vector<double> knots{t_begin};
  for (double b : breakpoints) {
    if (b > knots.back() && b < t_end) knots.push_back(b);
  }
  knots.push_back(t_end);

  std::map<long, StepOperators> cache;  // keyed by step length in units of 1e-15 s
  Vector x = x0;
  long counter = 0;
  for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
    const double a = knots[piece];
    const double b = knots[piece + 1];
    const long steps = std::max(1L, static_cast<long>(std::ceil((b - a) / dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    const StepOperators* ops = nullptr;
    if (kind == IntegratorKind::Exact) {
      const long key = std::lround(h * 1e15);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, exact_operators(m, h)).first;
      ops = &it->second;
    }
    for (long s = 0; s < steps; ++s) {
      const double t = a + h * static_cast<double>(s);
      const double t_next = (s + 1 == steps) ? b : a + h * static_cast<double>(s + 1);
      if (kind == IntegratorKind::Exact) {
        Vector next = ops->phi * x;
        if (f) {
          const Vector u0 = f(t, false);
          const Vector u1 = f(t_next, true);
          next += ops->gamma0 * u0 + ops->gamma1 * ((u1 - u0) / h);
        }
        x = std::move(next);
      } else {
        auto rhs = [&](double tt, const Vector& xx, bool left) {
          Vector d = m * xx;
          if (f) d += f(tt, left);
          return d;
        };
        const Vector k1 = rhs(t, x, false);
        const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1, false);
        const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2, false);
        const Vector k4 = rhs(t_next, x + h * k3, true);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      ++counter;
      if (blown_up(x)) {
        out.diverged = true;
        out.blowup_time = t_next;
        out.t.push_back(t_next);
        out.x.push_back(x);
        return out;
      }
      const bool last = (piece + 2 == knots.size()) && (s + 1 == steps);
      if (counter % stride == 0 || last) {
        out.t.push_back(t_next);
        out.x.push_back(x);
      }
    }
  }
  return out;
}

}  // namespace omas

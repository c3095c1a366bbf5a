#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omas/spectrum.hpp"

namespace omas {

enum class PerturbationKind { Zero, Constant, Sinusoidal, RandomPiecewise };

std::string to_string(PerturbationKind k);
PerturbationKind perturbation_kind_from_string(const std::string& s);

/// Bounded dynamics perturbation h(t) of the stacked agents. Every kind
/// satisfies |h(t)| <= h_bar for any agent count:
///  - Constant:   h_bar * amplitude / sqrt(dim) in every component (amplitude in [0, 1])
///  - Sinusoidal: component k is h_bar / sqrt(dim) * sin(frequency * t + 2 pi k / dim)
///  - RandomPiecewise: held for `hold` seconds, uniform in the h_bar ball
struct PerturbationModel {
  PerturbationKind kind = PerturbationKind::Zero;
  double h_bar = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  double hold = 0.05;
  double t_origin = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// h(t) for `dim` stacked components; left_limit selects h(t-) at hold boundaries.
  Vector value(double t, int dim, bool left_limit = false) const;
  /// Discontinuities of h strictly inside (t_begin, t_end).
  std::vector<double> breakpoints(double t_begin, double t_end) const;
  double bound() const { return kind == PerturbationKind::Zero ? 0.0 : h_bar; }
};

}  // namespace omas

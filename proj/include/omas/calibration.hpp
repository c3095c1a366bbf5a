#pragma once

#include <set>
#include <vector>

#include "omas/certificate.hpp"

namespace omas {

struct CalibrationTargets {
  double ratio = 0.0;
  double adt = 0.0;
};

struct CalibrationResult {
  double stable_margin = 0.0;
  double unstable_margin = 0.0;
  double gamma_fraction = 0.0;  // gamma_tilde = fraction * gamma_bar_s
  double gamma_tilde = 0.0;
  double ratio_lb = 0.0;
  double adt_lb = 0.0;
  double ratio_rel_error = 0.0;
  double adt_rel_error = 0.0;
  int evaluations = 0;

  double worst_rel_error() const { return std::max(ratio_rel_error, adt_rel_error); }
  /// Margins in the per-mode form accepted by GammaPolicy.
  GammaPolicy policy(const std::vector<ModeMatrix>& modes) const;
};

/// Searches one margin shared by the stable modes, one shared by the unstable
/// modes, and gamma_tilde as a fraction of gamma_bar_s, minimizing the larger
/// relative deviation of the two switching lower bounds from the targets.
CalibrationResult calibrate_margins(const std::vector<ModeMatrix>& modes,
                                    const std::set<int>& stable_set,
                                    double xi_breve_norm_max,
                                    const CalibrationTargets& targets);

}  // namespace omas

#include "omas/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "omas/errors.hpp"

namespace omas {
namespace {

struct PRange {
  double gamma = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool ok = false;
};

class Evaluator {
 public:
  Evaluator(const std::vector<ModeMatrix>& modes, const std::set<int>& stable,
            double xi_norm, const CalibrationTargets& t)
      : modes_(modes), stable_(stable), xi_norm_(xi_norm), targets_(t) {}

  // Deviation for (log stable margin, log unstable margin, fraction).
  double operator()(const std::array<double, 3>& x, CalibrationResult* out = nullptr) {
    ++evaluations;
    const double ms = std::exp(x[0]);
    const double mu_margin = std::exp(x[1]);
    const double frac = x[2];
    if (!(frac > 0.0 && frac < 1.0)) return kBad;

    double gs = -std::numeric_limits<double>::infinity();
    double gu = 0.0;
    double p_lo = std::numeric_limits<double>::infinity();
    double p_hi = 0.0;
    for (const auto& mm : modes_) {
      const bool st = stable_.count(mm.mode_id) > 0;
      const PRange& r = range(mm, st ? ms : mu_margin);
      if (!r.ok) return kBad;
      (st ? gs : gu) = std::max(st ? gs : gu, r.gamma);
      p_lo = std::min(p_lo, r.lo);
      p_hi = std::max(p_hi, r.hi);
    }
    const double gt = frac * gs;
    const double ratio = -(gu - gt) / (gs - gt);
    const double mu = std::sqrt(p_hi / p_lo) * std::max(1.0, xi_norm_);
    const double adt = -std::log(mu) / gt;
    const double er = std::abs(ratio / targets_.ratio - 1.0);
    const double ea = std::abs(adt / targets_.adt - 1.0);
    if (!std::isfinite(er) || !std::isfinite(ea)) return kBad;
    if (out) {
      out->stable_margin = ms;
      out->unstable_margin = mu_margin;
      out->gamma_fraction = frac;
      out->gamma_tilde = gt;
      out->ratio_lb = ratio;
      out->adt_lb = adt;
      out->ratio_rel_error = er;
      out->adt_rel_error = ea;
    }
    return std::max(er, ea);
  }

  int evaluations = 0;
  static constexpr double kBad = std::numeric_limits<double>::infinity();

 private:
  const PRange& range(const ModeMatrix& mm, double margin) {
    auto key = std::make_pair(mm.mode_id, margin);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    PRange r;
    try {
      const ModeCertificate c = solve_mode_certificate(mm, margin);
      r = {c.gamma, c.lambda_min, c.lambda_max, true};
    } catch (const Error&) {
      r.ok = false;
    }
    return cache_.emplace(key, r).first->second;
  }

  const std::vector<ModeMatrix>& modes_;
  const std::set<int>& stable_;
  double xi_norm_;
  CalibrationTargets targets_;
  std::map<std::pair<int, double>, PRange> cache_;
};

}  // namespace

GammaPolicy CalibrationResult::policy(const std::vector<ModeMatrix>& modes) const {
  GammaPolicy p;
  for (const auto& mm : modes) {
    p.per_mode[mm.mode_id] = mm.stable ? stable_margin : unstable_margin;
  }
  return p;
}

CalibrationResult calibrate_margins(const std::vector<ModeMatrix>& modes,
                                    const std::set<int>& stable_set,
                                    double xi_breve_norm_max,
                                    const CalibrationTargets& targets) {
  if (!(targets.ratio > 0.0) || !(targets.adt > 0.0)) {
    throw ConfigError("calibration targets must be positive");
  }
  Evaluator eval(modes, stable_set, xi_breve_norm_max, targets);

  // Coarse grid over log-margins in [1e-2, 3] and fractions in [0.05, 0.95].
  const int n_margin = 24;
  const int n_frac = 19;
  const double lo = std::log(1e-2), hi = std::log(3.0);
  std::array<double, 3> best{};
  double best_val = Evaluator::kBad;
  for (int a = 0; a < n_margin; ++a) {
    for (int b = 0; b < n_margin; ++b) {
      for (int f = 0; f < n_frac; ++f) {
        const std::array<double, 3> x{lo + (hi - lo) * a / (n_margin - 1),
                                      lo + (hi - lo) * b / (n_margin - 1),
                                      0.05 + 0.9 * f / (n_frac - 1)};
        const double v = eval(x);
        if (v < best_val) {
          best_val = v;
          best = x;
        }
      }
    }
  }
  if (best_val == Evaluator::kBad) {
    throw CertificateError("calibration: no admissible margin configuration found");
  }

  // Compass search refinement.
  std::array<double, 3> step{(hi - lo) / (n_margin - 1), (hi - lo) / (n_margin - 1),
                             0.9 / (n_frac - 1)};
  for (int iter = 0; iter < 400 && step[0] > 1e-6; ++iter) {
    bool improved = false;
    for (int d = 0; d < 3; ++d) {
      for (double sgn : {1.0, -1.0}) {
        auto x = best;
        x[d] += sgn * step[d];
        const double v = eval(x);
        if (v < best_val) {
          best_val = v;
          best = x;
          improved = true;
        }
      }
    }
    if (!improved) {
      for (auto& s : step) s *= 0.5;
    }
  }

  CalibrationResult result;
  eval(best, &result);
  result.evaluations = eval.evaluations;
  return result;
}

}  // namespace omas

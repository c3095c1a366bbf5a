#include "omas/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "omas/errors.hpp"
#include "omas/random.hpp"

namespace omas {

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::Zero: return "zero";
    case PerturbationKind::Constant: return "constant";
    case PerturbationKind::Sinusoidal: return "sinusoidal";
    case PerturbationKind::RandomPiecewise: return "random";
  }
  return "?";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  if (s == "zero") return PerturbationKind::Zero;
  if (s == "constant") return PerturbationKind::Constant;
  if (s == "sinusoidal") return PerturbationKind::Sinusoidal;
  if (s == "random") return PerturbationKind::RandomPiecewise;
  throw ConfigError("unknown perturbation kind '" + s +
                    "' (expected zero|constant|sinusoidal|random)");
}

void PerturbationModel::validate() const {
  if (!(h_bar >= 0.0) || !std::isfinite(h_bar)) throw ConfigError("perturbation: h_bar must be >= 0");
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) {
    throw ConfigError("perturbation: amplitude must lie in [0, 1]");
  }
  if (kind == PerturbationKind::RandomPiecewise && !(hold > 0.0)) {
    throw ConfigError("perturbation: hold interval must be positive");
  }
}

Vector PerturbationModel::value(double t, int dim, bool left_limit) const {
  if (dim <= 0) return Vector();
  switch (kind) {
    case PerturbationKind::Zero:
      return Vector::Zero(dim);
    case PerturbationKind::Constant:
      return Vector::Constant(dim, h_bar * amplitude / std::sqrt(double(dim)));
    case PerturbationKind::Sinusoidal: {
      Vector v(dim);
      const double a = h_bar / std::sqrt(double(dim));
      for (int k = 0; k < dim; ++k) {
        v[k] = a * std::sin(frequency * t + 2.0 * std::numbers::pi * k / dim);
      }
      return v;
    }
    case PerturbationKind::RandomPiecewise: {
      const double r = (t - t_origin) / hold;
      const double idx = left_limit ? std::ceil(r - 1e-9) - 1.0 : std::floor(r + 1e-9);
      const auto hold_index = static_cast<std::uint64_t>(std::max(0.0, idx));
      std::mt19937_64 gen(derive_seed(derive_seed(seed, hold_index), static_cast<std::uint64_t>(dim)));
      return uniform_in_ball(dim, h_bar, gen);
    }
  }
  return Vector::Zero(dim);
}

std::vector<double> PerturbationModel::breakpoints(double t_begin, double t_end) const {
  std::vector<double> out;
  if (kind != PerturbationKind::RandomPiecewise || h_bar == 0.0) return out;
  double k = std::floor((t_begin - t_origin) / hold) + 1.0;
  for (;; k += 1.0) {
    const double t = t_origin + k * hold;
    if (t >= t_end - 1e-12) break;
    if (t > t_begin + 1e-12) out.push_back(t);
  }
  return out;
}

}  // namespace omas

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "omas/calibration.hpp"
#include "omas/certificate.hpp"
#include "omas/simulate.hpp"

namespace omas {

/// Random jump gain: fixed per transition rule, drawn once from the scenario seed.
struct XiHatSpec {
  std::optional<Matrix> matrix;
  double random_scale = 0.0;

  bool operator==(const XiHatSpec&) const = default;
};

struct RuleSpec {
  int mode_before = 0;
  int mode_after = 0;
  std::vector<int> joins;
  std::vector<int> leaves;
  ImpulseSpec phi_ind;
  XiHatSpec xi_hat;
};

struct GenerateSpec {
  double target_margin = 0.05;
};

struct SignalSource {
  double t0 = 0.0;
  double tf = 0.0;
  std::vector<Segment> segments;       // explicit schedule
  std::optional<GenerateSpec> generate;  // or generated against the certified bounds
};

struct InitialStateSpec {
  std::optional<Vector> values;  // stacked, leader first
  double random_radius = 1.0;    // otherwise uniform in [-r, r] per component
};

struct CertificationOptions {
  GammaPolicy policy;
  std::optional<double> gamma_tilde;
  std::optional<double> gamma_fraction;  // gamma_tilde = fraction * gamma_bar_s
  double n_hat = 0.0;
  /// Unset: every suffix, or only j = 0 when the bound constants vanish.
  std::optional<SuffixMode> suffixes;
  std::optional<CalibrationTargets> calibration;
};

struct Scenario {
  AgentDynamics dyn;
  double rho = 0.0;
  std::vector<AugmentedMode> modes;
  SignalSource signal;
  std::vector<RuleSpec> events;
  PerturbationModel perturbation;  // seed is derived from `seed` when built
  InitialStateSpec initial_state;
  CertificationOptions certification;
  SimulationOptions simulation;
  std::uint64_t seed = 0;

  const AugmentedMode& mode(int id) const;
  std::map<int, int> mode_sizes() const;
};

/// Parses and validates a scenario document. Errors are ConfigError with the
/// offending field path.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json serialize_scenario(const Scenario& sc);

/// Field-by-field equality (modes compared through their augmented Laplacians).
bool equivalent(const Scenario& a, const Scenario& b);

struct ModeAnalysis {
  int id = 0;
  ModeClass cls = ModeClass::PositiveSpanning;
  ModeMatrix matrix;
  std::vector<Complex> laplacian_spectrum;  // of the augmented Laplacian
  std::vector<Complex> z_spectrum;
  std::optional<InstabilityReport> instability;  // NegativeMajority modes only
  bool definitions_agree = true;
};

struct Analysis {
  std::vector<ModeAnalysis> modes;
  std::set<int> stable;
  std::set<int> unstable;
  bool assumption1 = false;  // a positive spanning mode and a mode with a negative edge exist
  bool assumption2 = false;  // every mode with a negative edge is a negative-majority mode
  std::optional<double> rho_bound;
  bool rho_admissible = false;
  std::vector<std::string> warnings;

  std::vector<ModeMatrix> mode_matrices() const;
};

Analysis analyze(const Scenario& sc);

struct Certification {
  Analysis analysis;
  EventTable table;
  ImpulseBounds impulses;
  std::optional<CalibrationResult> calibration;
  CertificateBundle bundle;
  SwitchingSignal signal;  // with events attached
  Theorem1Report theorem1;
};

/// Certificates, bound constants, the (possibly generated) signal and the
/// suffix verdict. Throws AssumptionViolation / CertificateError; an unbounded
/// epsilon is left in the bundle for the caller to report.
Certification certify(const Scenario& sc);

/// Event table with the random jump gains materialized.
EventTable build_event_table(const Scenario& sc);

/// The explicit schedule with events attached; ConfigError for a generated signal.
SwitchingSignal explicit_signal(const Scenario& sc);

/// `signal` must carry its events (certify() and explicit_signal() attach them).
SimulationSetup build_setup(const Scenario& sc, const SwitchingSignal& signal);

/// Seed streams derived from the scenario seed.
namespace seed_stream {
inline constexpr std::uint64_t signal = 1;
inline constexpr std::uint64_t impulses = 2;
inline constexpr std::uint64_t perturbation = 3;
inline constexpr std::uint64_t initial_state = 4;
inline constexpr std::uint64_t xi_hat = 5;
}  // namespace seed_stream

}  // namespace omas

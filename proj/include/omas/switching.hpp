#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "omas/transition.hpp"

namespace omas {

struct Segment {
  double start = 0.0;
  int mode = 0;
};

/// Right-continuous piecewise-constant schedule on [t0, tf]. Segment k >= 1
/// starts at the switching instant t_k; events[k-1] is the jump at t_k.
class SwitchingSignal {
 public:
  SwitchingSignal() = default;
  SwitchingSignal(double t0, double tf, std::vector<Segment> segments,
                  std::vector<MigrationEvent> events = {});

  double t0() const { return t0_; }
  double tf() const { return tf_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<MigrationEvent>& events() const { return events_; }
  void set_events(std::vector<MigrationEvent> events);

  /// N(t0, tf): number of switching instants.
  int n_switches() const { return static_cast<int>(segments_.size()) - 1; }
  /// t_j, with t_0 the initial time.
  double instant(int j) const;
  double segment_end(int k) const;
  int mode_at(double t) const;

 private:
  double t0_ = 0.0;
  double tf_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<MigrationEvent> events_;
};

/// Attaches one event per switch, generated from the table.
void attach_events(SwitchingSignal& sig, const EventTable& table,
                   const std::map<int, int>& mode_sizes, int p, std::uint64_t seed);

struct ActivationTimes {
  double stable = 0.0;
  double unstable = 0.0;
};

ActivationTimes activation_times(const SwitchingSignal& sig, const std::set<int>& stable_set,
                                 double from);

/// Switching instants in [t_j, tf]; t_j itself counts for j >= 1.
int switches_in_suffix(const SwitchingSignal& sig, int j);

/// Largest tau with N(t_j, tf) <= n_hat + (tf - t_j) / tau; +inf if N <= n_hat.
double piecewise_adt(const SwitchingSignal& sig, double n_hat, int j);

struct SwitchingBudget {
  double n_hat = 0.0;
  double gamma_tilde = 0.0;
  double gamma_bar_s = 0.0;
  double gamma_bar_u = 0.0;
  double mu = 1.0;

  /// Throws ConfigError unless gamma_bar_s < gamma_tilde < 0 <= gamma_bar_u and mu >= 1.
  void validate() const;
  /// -(gamma_bar_u - gamma_tilde) / (gamma_bar_s - gamma_tilde)
  double ratio_lower_bound() const;
  /// -ln(mu) / gamma_tilde
  double adt_lower_bound() const;
};

enum class SuffixMode { All, First };

struct SuffixRecord {
  int j = 0;
  double t_j = 0.0;
  int switches = 0;
  ActivationTimes activation;
  double tau = 0.0;
  double ratio_lhs = 0.0;  // T_s (g_s - g) + T_u (g_u - g), must be <= 0
};

struct Theorem1Report {
  bool ok = false;
  bool ratio_ok = false;
  bool adt_ok = false;
  int worst_j_ratio = 0;
  int worst_j_adt = 0;
  double ratio_margin = 0.0;  // min_j of -ratio_lhs
  double adt_margin = 0.0;    // min_j of tau_j - adt_lower_bound
  double ratio_lower_bound = 0.0;
  double adt_lower_bound = 0.0;
  std::vector<SuffixRecord> suffixes;
};

/// Checks the activation-ratio and piecewise dwell-time conditions on every
/// suffix [t_j, tf] (or only j = 0 with SuffixMode::First).
Theorem1Report validate_theorem1(const SwitchingSignal& sig, const SwitchingBudget& budget,
                                 const std::set<int>& stable_set,
                                 SuffixMode mode = SuffixMode::All);

struct SignalSpec {
  double t0 = 0.0;
  double horizon = 0.0;
  std::vector<int> stable_modes;
  std::vector<int> unstable_modes;
  double ratio_lb = 0.0;
  double adt_lb = 0.0;
  std::uint64_t seed = 0;
  double target_margin = 0.05;
};

/// Alternates stable and unstable segments with every suffix meeting
/// ratio_lb and adt_lb inflated by target_margin. No events are attached.
SwitchingSignal generate_signal(const SignalSpec& spec);

}  // namespace omas

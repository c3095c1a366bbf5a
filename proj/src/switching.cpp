#include "omas/switching.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "omas/errors.hpp"

namespace omas {

SwitchingSignal::SwitchingSignal(double t0, double tf, std::vector<Segment> segments,
                                 std::vector<MigrationEvent> events)
    : t0_(t0), tf_(tf), segments_(std::move(segments)) {
  if (!(tf_ > t0_)) throw ConfigError("switching signal: tf must exceed t0");
  if (segments_.empty()) throw ConfigError("switching signal: no segments");
  if (segments_.front().start != t0_) {
    throw ConfigError("switching signal: first segment must start at t0");
  }
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    if (!(segments_[k].start > segments_[k - 1].start)) {
      throw ConfigError("switching signal: segment starts must be strictly increasing (segment " +
                        std::to_string(k) + ")");
    }
  }
  if (!(segments_.back().start < tf_)) {
    throw ConfigError("switching signal: last segment starts at or after tf");
  }
  set_events(std::move(events));
}

void SwitchingSignal::set_events(std::vector<MigrationEvent> events) {
  if (!events.empty()) {
    if (static_cast<int>(events.size()) != n_switches()) {
      throw ConfigError("switching signal: " + std::to_string(events.size()) +
                        " events for " + std::to_string(n_switches()) + " switches");
    }
    for (int k = 0; k < n_switches(); ++k) {
      const auto& ev = events[k];
      if (ev.mode_before != segments_[k].mode || ev.mode_after != segments_[k + 1].mode) {
        throw ConfigError("switching signal: event " + std::to_string(k + 1) + " maps " +
                          std::to_string(ev.mode_before) + "->" +
                          std::to_string(ev.mode_after) + " but the signal switches " +
                          std::to_string(segments_[k].mode) + "->" +
                          std::to_string(segments_[k + 1].mode));
      }
    }
  }
  events_ = std::move(events);
}

double SwitchingSignal::instant(int j) const {
  if (j < 0 || j > n_switches()) throw ConfigError("switching signal: instant index out of range");
  return j == 0 ? t0_ : segments_[j].start;
}

double SwitchingSignal::segment_end(int k) const {
  return k + 1 < static_cast<int>(segments_.size()) ? segments_[k + 1].start : tf_;
}

int SwitchingSignal::mode_at(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.start; });
  if (it == segments_.begin()) return segments_.front().mode;
  return std::prev(it)->mode;
}

void attach_events(SwitchingSignal& sig, const EventTable& table,
                   const std::map<int, int>& mode_sizes, int p, std::uint64_t seed) {
  std::vector<MigrationEvent> events;
  const auto& segs = sig.segments();
  for (int k = 1; k <= sig.n_switches(); ++k) {
    events.push_back(instantiate_event(table, k, segs[k - 1].mode, segs[k].mode, mode_sizes, p,
                                       seed));
  }
  sig.set_events(std::move(events));
}

ActivationTimes activation_times(const SwitchingSignal& sig, const std::set<int>& stable_set,
                                 double from) {
  if (from < sig.t0() || from > sig.tf()) {
    throw ConfigError("activation_times: start time outside [t0, tf]");
  }
  ActivationTimes out;
  const auto& segs = sig.segments();
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    const double lo = std::max(segs[k].start, from);
    const double hi = sig.segment_end(k);
    if (hi <= lo) continue;
    (stable_set.count(segs[k].mode) ? out.stable : out.unstable) += hi - lo;
  }
  return out;
}

int switches_in_suffix(const SwitchingSignal& sig, int j) {
  const int k = sig.n_switches();
  if (j < 0 || j > k) throw ConfigError("suffix index out of range");
  return j == 0 ? k : k - j + 1;
}

double piecewise_adt(const SwitchingSignal& sig, double n_hat, int j) {
  const double n = switches_in_suffix(sig, j);
  if (n <= n_hat) return std::numeric_limits<double>::infinity();
  return (sig.tf() - sig.instant(j)) / (n - n_hat);
}

void SwitchingBudget::validate() const {
  if (!(gamma_bar_s < gamma_tilde && gamma_tilde < 0.0)) {
    throw ConfigError("gamma_tilde = " + std::to_string(gamma_tilde) +
                      " must lie in (gamma_bar_s, 0) = (" + std::to_string(gamma_bar_s) +
                      ", 0)");
  }
  if (gamma_bar_u < 0.0) throw ConfigError("gamma_bar_u must be nonnegative");
  if (!(mu >= 1.0)) throw ConfigError("mu must be at least 1");
  if (n_hat < 0.0) throw ConfigError("N_hat must be nonnegative");
}

double SwitchingBudget::ratio_lower_bound() const {
  return -(gamma_bar_u - gamma_tilde) / (gamma_bar_s - gamma_tilde);
}

double SwitchingBudget::adt_lower_bound() const { return -std::log(mu) / gamma_tilde; }

Theorem1Report validate_theorem1(const SwitchingSignal& sig, const SwitchingBudget& budget,
                                 const std::set<int>& stable_set, SuffixMode mode) {
  budget.validate();
  Theorem1Report rep;
  rep.ratio_lower_bound = budget.ratio_lower_bound();
  rep.adt_lower_bound = budget.adt_lower_bound();
  rep.ratio_margin = std::numeric_limits<double>::infinity();
  rep.adt_margin = std::numeric_limits<double>::infinity();

  const int k = sig.n_switches();
  const auto& segs = sig.segments();
  const double ds = budget.gamma_bar_s - budget.gamma_tilde;
  const double du = budget.gamma_bar_u - budget.gamma_tilde;

  // Suffix sums accumulated from the final segment backwards.
  std::vector<ActivationTimes> tail(k + 1);
  ActivationTimes acc;
  for (int s = k; s >= 0; --s) {
    const double len = sig.segment_end(s) - segs[s].start;
    (stable_set.count(segs[s].mode) ? acc.stable : acc.unstable) += len;
    tail[s] = acc;
  }

  const int last = mode == SuffixMode::First ? 0 : k;
  for (int j = 0; j <= last; ++j) {
    SuffixRecord r;
    r.j = j;
    r.t_j = sig.instant(j);
    r.switches = switches_in_suffix(sig, j);
    r.activation = tail[j];
    r.tau = piecewise_adt(sig, budget.n_hat, j);
    r.ratio_lhs = r.activation.stable * ds + r.activation.unstable * du;
    if (-r.ratio_lhs < rep.ratio_margin) {
      rep.ratio_margin = -r.ratio_lhs;
      rep.worst_j_ratio = j;
    }
    const double adt_slack = r.tau - rep.adt_lower_bound;
    if (adt_slack < rep.adt_margin) {
      rep.adt_margin = adt_slack;
      rep.worst_j_adt = j;
    }
    rep.suffixes.push_back(r);
  }
  rep.ratio_ok = rep.ratio_margin >= 0.0;
  rep.adt_ok = rep.adt_margin >= 0.0;
  rep.ok = rep.ratio_ok && rep.adt_ok;
  return rep;
}

SwitchingSignal generate_signal(const SignalSpec& spec) {
  if (spec.stable_modes.empty()) throw ConfigError("signal generation: no stable modes");
  if (!(spec.horizon > 0.0)) throw ConfigError("signal generation: horizon must be positive");
  const double tf = spec.t0 + spec.horizon;
  if (spec.unstable_modes.empty()) {
    return SwitchingSignal(spec.t0, tf, {{spec.t0, spec.stable_modes.front()}});
  }
  if (!(spec.ratio_lb > 0.0) || !(spec.adt_lb > 0.0)) {
    throw ConfigError("signal generation: ratio_lb and adt_lb must be positive");
  }
  const double ratio = spec.ratio_lb * (1.0 + spec.target_margin);
  const double adt = spec.adt_lb * (1.0 + spec.target_margin);

  // One unstable dwell u followed by a stable dwell s = ratio * u; the pair
  // must average two switches per 2*adt and the stable dwell alone one per adt.
  const double pair = std::max(2.0 * adt, adt * (1.0 + ratio) / ratio);
  const double unstable_dwell = pair / (1.0 + ratio);
  const double stable_dwell = pair - unstable_dwell;

  int pairs = static_cast<int>(std::floor(spec.horizon / pair));
  double lead = spec.horizon - pairs * pair;
  if (pairs > 1 && lead < 1e-9 * spec.horizon) {
    --pairs;
    lead += pair;
  }
  if (pairs < 1 || lead < 1e-9 * spec.horizon) {
    throw ConfigError("signal generation: horizon " + std::to_string(spec.horizon) +
                      " is too short for one unstable/stable pair of total length " +
                      std::to_string(pair) + " plus a leading stable segment");
  }

  std::vector<int> unstable_order;
  for (int i = 0; i < pairs; ++i) {
    unstable_order.push_back(spec.unstable_modes[i % spec.unstable_modes.size()]);
  }
  std::mt19937_64 gen(spec.seed);
  std::shuffle(unstable_order.begin(), unstable_order.end(), gen);

  std::vector<Segment> segs;
  segs.push_back({spec.t0, spec.stable_modes.front()});
  double t = spec.t0 + lead;
  for (int i = 0; i < pairs; ++i) {
    segs.push_back({t, unstable_order[i]});
    t += unstable_dwell;
    segs.push_back({t, spec.stable_modes[(i + 1) % spec.stable_modes.size()]});
    t += stable_dwell;
  }
  return SwitchingSignal(spec.t0, tf, std::move(segs));
}

}  // namespace omas

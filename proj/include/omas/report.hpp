#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "json.hpp"

#include "omas/scenario.hpp"

namespace omas {

nlohmann::json analysis_to_json(const Analysis& a, const Scenario& sc);
std::string analysis_table(const Analysis& a);

nlohmann::json bundle_to_json(const CertificateBundle& b);
nlohmann::json theorem1_to_json(const Theorem1Report& r, bool include_suffixes = false);
nlohmann::json certification_to_json(const Certification& c);

/// {t0, tf, segments}; the form read back by signal_from_json and by the
/// scenario "signal" field.
nlohmann::json signal_to_json(const SwitchingSignal& sig);
SwitchingSignal signal_from_json(const nlohmann::json& j);

/// t, mode, agent_count, agent<i>_dim<d> (i = 0 is the leader), err<i>_dim<d>.
/// Columns cover the largest agent count; absent agents are left empty.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_event_csv(std::ostream& os, const Trajectory& traj);
void write_lyapunov_csv(std::ostream& os, const LyapunovTrace& tr);

nlohmann::json summary_to_json(const SimulationSummary& s, std::uint64_t seed,
                               const LyapunovTrace* lyap = nullptr);

}  // namespace omas

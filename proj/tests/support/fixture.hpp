#pragma once

#include <string>
#include <vector>

#include "omas/mode_dynamics.hpp"
#include "omas/signed_graph.hpp"

namespace omas::fixture {

inline constexpr double kRho = -2.95;

/// A = [0 1; -0.2 0.05]
AgentDynamics dynamics();

/// The four-mode example, built from its dense Laplacians and leader links.
std::vector<AugmentedMode> modes();

/// alpha of each mode matrix, frozen from an independent eigen-solve.
inline constexpr double kAlpha[4] = {-2.925, 0.025, 5.925, 2.975};

std::string scenario_path(const std::string& name);

}  // namespace omas::fixture

#include "fixture.hpp"

namespace omas::fixture {

AgentDynamics dynamics() {
  Matrix a(2, 2);
  a << 0.0, 1.0, -0.2, 0.05;
  return AgentDynamics{a};
}

std::vector<AugmentedMode> modes() {
  Matrix l1(4, 4), l2(3, 3), l3(5, 5), l4(3, 3);
  l1 << 1, 0, 0, -1,
        0, 0, 0, 0,
        0, -1, 1, 0,
        0, 0, -1, 1;
  l2 << 0, 0, 0,
        0, 0, 0,
        -1, -1, 2;
  l3 << 0, 0, 0, 0, 0,
        0, -2, 1, 0, 1,
        0, 0, 0, 0, 0,
        0, 0, 0, 0, 0,
        0, 0, 0, 0, 0;
  l4 << 1, 0, -1,
        1, -1, 0,
        0, 0, 0;
  Vector d1(4), d2(3), d3(5), d4(3);
  d1 << 1, 1, 0, 0;
  d2 << 1, 0, 0;
  d3 << -1, 0, 0, -1, 0;
  d4 << 0, 0, -1;
  return {AugmentedMode(1, SignedDigraph::from_laplacian(l1), d1),
          AugmentedMode(2, SignedDigraph::from_laplacian(l2), d2),
          AugmentedMode(3, SignedDigraph::from_laplacian(l3), d3),
          AugmentedMode(4, SignedDigraph::from_laplacian(l4), d4)};
}

std::string scenario_path(const std::string& name) {
  return std::string(OMAS_SOURCE_DIR) + "/scenarios/" + name;
}

}  // namespace omas::fixture

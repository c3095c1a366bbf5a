#pragma once

#include <cstdint>
#include <random>

#include "omas/spectrum.hpp"

namespace omas {

/// Independent child seed for a named stream; every random draw in a run is
/// derived from one root seed through this.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

Vector uniform_on_sphere(int dim, double radius, std::mt19937_64& gen);
Vector uniform_in_ball(int dim, double radius, std::mt19937_64& gen);
Matrix uniform_matrix(int rows, int cols, double scale, std::mt19937_64& gen);

}  // namespace omas

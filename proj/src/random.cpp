#include "omas/random.hpp"

#include <cmath>

namespace omas {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 over the combined words
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector uniform_on_sphere(int dim, double radius, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  double n = 0.0;
  while (n == 0.0) {
    for (int i = 0; i < dim; ++i) v[i] = normal(gen);
    n = v.norm();
  }
  return v * (radius / n);
}

Vector uniform_in_ball(int dim, double radius, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::pow(unit(gen), 1.0 / dim);
  return uniform_on_sphere(dim, r, gen);
}

Matrix uniform_matrix(int rows, int cols, double scale, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(gen);
  return m;
}

}  // namespace omas

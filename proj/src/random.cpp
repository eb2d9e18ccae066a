#include "rigcert/random.hpp"

#include <cmath>
#include <numbers>

namespace rigcert {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

Mat random_rotation(int n, Rng& rng) {
  if (n == 2) return rotation2(uniform(rng, 0, 2 * std::numbers::pi));
  const double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
  return rotation_from_quaternion(w, x, y, z);
}

Mat random_unit_matrix(int n, Rng& rng) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  return a / fnorm(a);
}

Mat random_unit_symmetric(int n, Rng& rng) {
  Mat a = sym(random_unit_matrix(n, rng));
  return a / fnorm(a);
}

Mat random_with_singular_values(int n, double lo, double hi, Rng& rng) {
  Vec s(n);
  for (int i = 0; i < n; ++i) s(i) = std::exp(uniform(rng, std::log(lo), std::log(hi)));
  return random_rotation(n, rng) * s.asDiagonal() * random_rotation(n, rng);
}

Mat random_at_rotation_distance(int n, double r, Rng& rng) {
  Vec u(n);
  for (int i = 0; i < n; ++i) u(i) = normal(rng);
  u /= u.norm();
  const Mat v = random_rotation(n, rng);
  Vec s = Vec::Ones(n) + r * u;
  return random_rotation(n, rng) * v * s.asDiagonal() * v.transpose();
}

}  // namespace rigcert

#pragma once

#include <cstdint>
#include <random>

#include "rigcert/tensor_core.hpp"

namespace rigcert {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo = 0, double hi = 1);
double normal(Rng& rng);

// Haar-distributed rotation (angle for n = 2, quaternion for n = 3).
Mat random_rotation(int n, Rng& rng);
// Random matrix with Frobenius norm 1.
Mat random_unit_matrix(int n, Rng& rng);
// Random symmetric matrix with Frobenius norm 1.
Mat random_unit_symmetric(int n, Rng& rng);
// Q1 V diag(s) V^T with log-uniform singular values in [lo, hi]; det > 0.
Mat random_with_singular_values(int n, double lo, double hi, Rng& rng);
// Q V diag(1 + r u) V^T with |u| = 1, so dist(F, SO(n)) = r (r < 1).
Mat random_at_rotation_distance(int n, double r, Rng& rng);

}  // namespace rigcert

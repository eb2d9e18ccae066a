#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rigcert/error.hpp"
#include "rigcert/random.hpp"
#include "rigcert/tensor_core.hpp"

using namespace rigcert;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Brute-force distance to planar rotations on a uniform angle grid.
double theta_grid_dist(const Mat& f, int samples) {
  double best = INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double t = 2 * std::numbers::pi * i / samples;
    best = std::min(best, (f - rotation2(t)).norm());
  }
  return best;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("polar decomposition of closed-form cases") {
  const Polar p = polar_decompose(identity(2));
  CHECK((p.R - identity(2)).norm() == doctest::Approx(0).epsilon(1e-15));
  CHECK((p.U - identity(2)).norm() == doctest::Approx(0).epsilon(1e-15));

  const Mat r = rotation2(std::numbers::pi / 6);
  const Polar pr = polar_decompose(r);
  CHECK((pr.R - r).norm() < 1e-14);
  CHECK((pr.U - identity(2)).norm() < 1e-14);

  const Polar pd = polar_decompose(diag2(2, 0.5));
  CHECK((pd.R - identity(2)).norm() < 1e-15);
  CHECK((pd.U - diag2(2, 0.5)).norm() < 1e-15);
}

TEST_CASE("polar decomposition errors") {
  CHECK(code_of([] { polar_decompose(diag2(1, -1)); }) == ErrorCode::DetNonPositive);
  CHECK(code_of([] { polar_decompose(diag2(1, 0)); }) == ErrorCode::DetNonPositive);
  CHECK(code_of([] { polar_decompose(diag2(1, 1e-15)); }) == ErrorCode::Singular);
  CHECK(code_of([] { polar_decompose(Mat::Identity(4, 4).topLeftCorner(3, 2)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("polar round trip for random R U") {
  Rng rng(11);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 2000; ++trial) {
      const Mat r = random_rotation(n, rng);
      const Mat v = random_rotation(n, rng);
      Vec s(n);
      for (int i = 0; i < n; ++i) s(i) = std::exp(uniform(rng, std::log(0.1), std::log(10.0)));
      const Mat u = v * s.asDiagonal() * v.transpose();
      const Polar p = polar_decompose(r * u);
      CHECK((p.R - r).norm() < 1e-9);
      CHECK((p.U - u).norm() < 1e-9);
      CHECK((p.R.transpose() * p.R - identity(n)).norm() <= 1e-12);
      CHECK(p.R.determinant() > 0);
      CHECK((p.U - p.U.transpose()).norm() == 0);
      CHECK((p.R * p.U - r * u).norm() <= 1e-10 * (1 + (r * u).norm()));
    }
  }
}

TEST_CASE("distance to rotations against the angle-grid oracle") {
  CHECK(dist_to_rotations(identity(2)) == 0);
  CHECK(dist_to_rotations(rotation2(1.234)) < 1e-15);
  const double d = dist_to_rotations(diag2(2, 0.5));
  CHECK(d == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  CHECK(std::abs(theta_grid_dist(diag2(2, 0.5), 1000000) - d) <= 1e-6);

  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat f = random_with_singular_values(2, 0.2, 5, rng);
    const double grid = theta_grid_dist(f, 1000000);
    const double exact = dist_to_rotations(f);
    CHECK(exact <= grid + 1e-9);
    CHECK(grid - exact <= 1e-6);
  }
  CHECK(code_of([] { dist_to_rotations(diag2(-1, 1)); }) == ErrorCode::DetNonPositive);
}

TEST_CASE("distance to rotations in 3D is a one-sided lower bound of sampled rotations") {
  Rng rng(17);
  const Mat f = random_with_singular_values(3, 0.2, 5, rng);
  const double d = dist_to_rotations(f);
  double best = INFINITY;
  for (int i = 0; i < 100000; ++i) best = std::min(best, (f - random_rotation(3, rng)).norm());
  CHECK(best >= d - 1e-9);
  // The polar factor attains the distance.
  CHECK((f - polar_decompose(f).R).norm() == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("strain") {
  CHECK(strain(identity(3)).norm() == 0);
  const Mat e = strain(2 * identity(2));
  CHECK((e - 1.5 * identity(2)).norm() == 0);
  CHECK(e.norm() == doctest::Approx(1.5 * std::sqrt(2.0)));
  Rng rng(3);
  for (int n : {2, 3}) {
    for (int t = 0; t < 100; ++t) {
      const Mat q = random_rotation(n, rng);
      const Mat f = random_with_singular_values(n, 0.3, 3, rng);
      CHECK(strain(q).norm() < 1e-15);
      CHECK((strain(q * f) - strain(f)).norm() < 1e-14);
    }
  }
}

TEST_CASE("wedge") {
  const Vec e1 = Vec::Unit(3, 0), e2 = Vec::Unit(3, 1), e3 = Vec::Unit(3, 2);
  std::array<Vec, 2> args{e1, e2};
  CHECK((wedge(args) - e3).norm() == 0);
  std::array<Vec, 2> swapped{e2, e1};
  CHECK((wedge(swapped) + e3).norm() == 0);

  std::array<Vec, 1> planar{Vec::Unit(2, 0)};
  CHECK((wedge(planar) - Vec::Unit(2, 1)).norm() == 0);

  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const Mat q = random_rotation(3, rng);
    std::array<Vec, 2> rotated{q * e1, q * e2};
    CHECK((wedge(rotated) - q * e3).norm() < 1e-14);
    Vec a(3), b(3);
    a << normal(rng), normal(rng), normal(rng);
    b << normal(rng), normal(rng), normal(rng);
    std::array<Vec, 2> ab{a, b}, ba{b, a};
    CHECK((wedge(ab) + wedge(ba)).norm() == 0);
    CHECK(wedge(ab).norm() <= a.norm() * b.norm() * (1 + 1e-15));
  }
  std::array<Vec, 2> bad{Vec::Unit(2, 0), Vec::Unit(2, 1)};
  CHECK(code_of([&] { wedge(bad); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("strain-distance sandwich") {
  const SandwichCheck at_i = strain_dist_sandwich(identity(2));
  CHECK(at_i.dist == 0);
  CHECK(at_i.strain_norm == 0);
  CHECK(at_i.holds());

  const SandwichCheck c = strain_dist_sandwich(diag2(2, 0.5));
  CHECK(c.dist * c.dist == doctest::Approx(1.25));
  CHECK(c.strain_norm == doctest::Approx(std::sqrt(2.390625)));
  CHECK(2 * std::sqrt(2.0) * c.strain_norm == doctest::Approx(4.373).epsilon(1e-3));
  CHECK(std::sqrt(2.0) * c.dist * (c.dist + 2 * std::sqrt(2.0)) == doctest::Approx(6.240).epsilon(1e-3));
  CHECK(c.holds());

  Rng rng(2024);
  int failures = 0;
  for (int n : {2, 3})
    for (int t = 0; t < 10000; ++t)
      if (!strain_dist_sandwich(random_with_singular_values(n, 0.2, 5, rng)).holds()) ++failures;
  CHECK(failures == 0);
  CHECK(code_of([] { strain_dist_sandwich(diag2(1, -2)); }) == ErrorCode::DetNonPositive);
}

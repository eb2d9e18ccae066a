#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rigcert/error.hpp"
#include "rigcert/harmonic.hpp"
#include "rigcert/random.hpp"

using namespace rigcert;

namespace {

GridField rect(int nx, int ny, double h = 1.0, int matrix_dim = 0) {
  return GridField::box(2, {nx, ny, 1}, h, matrix_dim);
}

GridField l_shape() {
  GridField f = rect(3, 3);
  f.mask[f.index(2, 2)] = 0;
  return f;
}

GridField random_field(int nx, int ny, Rng& rng) {
  GridField f = rect(nx, ny, 1.0 / nx);
  for (std::size_t i = 0; i < f.box_cells(); ++i) f.at(i) = uniform(rng, -1, 1);
  return f;
}

// Mixed family: white noise, jumps, spikes and smooth bumps.
GridField varied_field(int nx, int ny, int kind, Rng& rng) {
  GridField f = rect(nx, ny, 1.0 / nx);
  const double a = uniform(rng, 0.2, 2), cx = uniform(rng, 0, nx), cy = uniform(rng, 0, ny);
  for (std::size_t i = 0; i < f.box_cells(); ++i) {
    const auto c = f.coords(i);
    switch (kind % 4) {
      case 0: f.at(i) = uniform(rng, -1, 1); break;
      case 1: f.at(i) = (c[0] < cx ? a : -0.3 * a) + 0.1 * uniform(rng, -1, 1); break;
      case 2: f.at(i) = std::hypot(c[0] - cx, c[1] - cy) < 1 ? a : 0.01 * uniform(rng, 0, 1); break;
      default: f.at(i) = std::sin(a * c[0]) * std::cos(0.7 * a * c[1]) + 0.2; break;
    }
  }
  return f;
}

// Independent oracle: for every cell scan every lattice cube that contains
// it, test containment cell by cell and average in row-major order.
struct Oracle {
  GridField star, sharp;
};

Oracle brute_force(const GridField& f) {
  Oracle o{f.scalar_like(), f.scalar_like()};
  const int nx = f.extent[0], ny = f.extent[1];
  const int nc = f.components();
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      if (!f.mask[f.index(x, y)]) continue;
      double best_star = 0, best_sharp = 0;
      for (int s = 1; s <= std::min(nx, ny); ++s)
        for (int cy = y - s + 1; cy <= y; ++cy)
          for (int cx = x - s + 1; cx <= x; ++cx) {
            if (cx < 0 || cy < 0 || cx + s > nx || cy + s > ny) continue;
            bool inside = true;
            for (int j = 0; j < s && inside; ++j)
              for (int i = 0; i < s; ++i)
                if (!f.mask[f.index(cx + i, cy + j)]) inside = false;
            if (!inside) continue;
            const double count = double(s) * s;
            std::vector<double> mean(nc, 0.0);
            double abs_sum = 0;
            for (int j = 0; j < s; ++j)
              for (int i = 0; i < s; ++i) {
                const std::size_t idx = f.index(cx + i, cy + j);
                double sq = 0;
                for (int c = 0; c < nc; ++c) {
                  mean[c] += f.at(idx, c);
                  sq += f.at(idx, c) * f.at(idx, c);
                }
                abs_sum += nc == 1 ? std::abs(f.at(idx)) : std::sqrt(sq);
              }
            for (double& m : mean) m /= count;
            double osc = 0;
            for (int j = 0; j < s; ++j)
              for (int i = 0; i < s; ++i) {
                const std::size_t idx = f.index(cx + i, cy + j);
                if (nc == 1) {
                  osc += std::abs(f.at(idx) - mean[0]);
                } else {
                  double sq = 0;
                  for (int c = 0; c < nc; ++c) sq += (f.at(idx, c) - mean[c]) * (f.at(idx, c) - mean[c]);
                  osc += std::sqrt(sq);
                }
              }
            best_star = std::max(best_star, abs_sum / count);
            best_sharp = std::max(best_sharp, osc / count);
          }
      o.star.at(f.index(x, y)) = best_star;
      o.sharp.at(f.index(x, y)) = best_sharp;
    }
  return o;
}

std::size_t brute_count(const GridField& f) {
  std::size_t count = 0;
  for (int s = 1; s <= std::min(f.extent[0], f.extent[1]); ++s)
    for (int cy = 0; cy + s <= f.extent[1]; ++cy)
      for (int cx = 0; cx + s <= f.extent[0]; ++cx) {
        bool inside = true;
        for (int j = 0; j < s; ++j)
          for (int i = 0; i < s; ++i) inside = inside && f.mask[f.index(cx + i, cy + j)];
        count += inside;
      }
  return count;
}

GridField left_half(int n) {
  GridField f = rect(n, n, 1.0 / n);
  for (std::size_t i = 0; i < f.box_cells(); ++i) f.at(i) = f.coords(i)[0] < n / 2 ? 1.0 : 0.0;
  return f;
}

void check_equal_fields(const GridField& a, const GridField& b) {
  for (std::size_t i = 0; i < a.box_cells(); ++i)
    if (a.inside(i)) REQUIRE(a.at(i) == b.at(i));
}

}  // namespace

TEST_CASE("cube family counts") {
  CHECK(cube_family(rect(2, 2)).size() == 5);
  CHECK(cube_family(rect(3, 2)).size() == 8);
  for (int a = 1; a <= 9; ++a)
    for (int b = 1; b <= 9; ++b) {
      std::size_t closed = 0;
      for (int s = 1; s <= std::min(a, b); ++s) closed += std::size_t(a - s + 1) * (b - s + 1);
      CHECK(cube_family(rect(a, b)).size() == closed);
    }
  const GridField l = l_shape();
  CHECK(cube_family(l).size() == brute_count(l));
  CHECK(cube_family(l).size() == 8 + 3);

  GridField cube3 = GridField::box(3, {3, 3, 3}, 1.0);
  CHECK(cube_family(cube3).size() == 27 + 8 + 1);

  GridField empty = rect(2, 2);
  std::fill(empty.mask.begin(), empty.mask.end(), 0);
  CHECK_THROWS_AS(cube_family(empty), Error);
}

TEST_CASE("maximal functions of simple fields") {
  GridField c = rect(5, 4);
  std::fill(c.values.begin(), c.values.end(), -2.5);
  const CubeFamily fam = cube_family(c);
  const GridField star = hl_maximal(c, fam);
  const GridField sharp = fs_sharp(c, fam);
  for (std::size_t i = 0; i < c.box_cells(); ++i) {
    CHECK(star.at(i) == 2.5);
    CHECK(sharp.at(i) == 0);
  }

  GridField two = rect(2, 1);
  two.at(1) = 1;
  const GridField s2 = fs_sharp(two, cube_family(two));
  CHECK(s2.at(0) == 0.0);  // 2x1 box holds only unit cubes
  GridField pair = rect(2, 2);
  std::fill(pair.mask.begin(), pair.mask.end(), 0);
  pair.mask[pair.index(0, 0)] = pair.mask[pair.index(1, 0)] = 1;
  pair.at(pair.index(1, 0)) = 1;
  CHECK(fs_sharp(pair, cube_family(pair)).at(0) == 0.0);

  GridField spike = rect(8, 8);
  spike.at(spike.index(3, 4)) = 1;
  const GridField ss = hl_maximal(spike, cube_family(spike));
  CHECK(ss.at(spike.index(3, 4)) == 1);
  CHECK(ss.at(spike.index(4, 4)) == 0.25);
  CHECK(ss.at(spike.index(7, 7)) == doctest::Approx(1.0 / 25));
  check_equal_fields(ss, brute_force(spike).star);
  const PointwiseReport pr = verify_pointwise_bounds(spike);
  CHECK(pr.violations == 0);
}

TEST_CASE("two-cell oscillation") {
  // Two cells side by side inside a 2x2 box whose second row is excluded:
  // no 2-cube fits, so both cells see only unit cubes.
  GridField f = rect(2, 2);
  f.at(f.index(1, 0)) = 1;
  f.at(f.index(0, 1)) = 0;
  f.at(f.index(1, 1)) = 1;
  // Full 2x2 box: the 2-cube has mean 1/2 and mean oscillation 1/2.
  const GridField s = fs_sharp(f, cube_family(f));
  for (std::size_t i = 0; i < f.box_cells(); ++i) CHECK(s.at(i) == 0.5);
}

TEST_CASE("sharp and maximal functions match the brute-force oracle exactly") {
  Rng rng(99);
  for (int n : {4, 8, 13, 16}) {
    const GridField f = random_field(n, n, rng);
    const Oracle o = brute_force(f);
    const CubeFamily fam = cube_family(f);
    check_equal_fields(hl_maximal(f, fam), o.star);
    check_equal_fields(fs_sharp(f, fam), o.sharp);
  }
  GridField l = rect(9, 7);
  for (int j = 4; j < 7; ++j)
    for (int i = 5; i < 9; ++i) l.mask[l.index(i, j)] = 0;
  for (std::size_t i = 0; i < l.box_cells(); ++i) l.at(i) = l.inside(i) ? uniform(rng, -1, 1) : 0;
  const Oracle ol = brute_force(l);
  check_equal_fields(hl_maximal(l, cube_family(l)), ol.star);
  check_equal_fields(fs_sharp(l, cube_family(l)), ol.sharp);

  GridField m = rect(8, 8, 0.125, 2);
  for (double& v : m.values) v = uniform(rng, -1, 1);
  check_equal_fields(fs_sharp(m, cube_family(m)), brute_force(m).sharp);

  const GridField half = left_half(8);
  check_equal_fields(hl_maximal(half, cube_family(half)), brute_force(half).star);
}

TEST_CASE("BMO seminorm and norm") {
  const GridField half = left_half(8);
  const CubeFamily fam = cube_family(half);
  CHECK(bmo_seminorm(half, fam) == 0.5);
  CHECK(bmo_l1_norm(half, fam) == 1.0);

  GridField c = rect(6, 6);
  std::fill(c.values.begin(), c.values.end(), -3.0);
  CHECK(bmo_seminorm(c, cube_family(c)) == 0);
  CHECK(bmo_l1_norm(c, cube_family(c)) == 3.0);

  Rng rng(4);
  GridField f = random_field(10, 10, rng);
  const CubeFamily ff = cube_family(f);
  const double base = bmo_seminorm(f, ff);
  GridField shifted = f;
  for (double& v : shifted.values) v += 0.5;  // exactly representable shift keeps sums close
  CHECK(bmo_seminorm(shifted, ff) == doctest::Approx(base).epsilon(1e-14));

  GridField centered = f;
  const double mean = domain_mean(f)(0, 0);
  for (double& v : centered.values) v -= mean;
  CHECK(bmo_l1_norm(centered, ff) == doctest::Approx(bmo_seminorm(centered, ff)).epsilon(1e-12));

  const GridField sharp = fs_sharp(f, ff);
  CHECK(*std::max_element(sharp.values.begin(), sharp.values.end()) == base);
}

TEST_CASE("averaged quantities are scale and translation invariant") {
  Rng rng(12);
  GridField f = random_field(12, 9, rng);
  GridField g = f;
  g.spacing = 7.25;
  g.origin = {3.0, -11.0, 0};
  const CubeFamily ff = cube_family(f);
  CHECK(bmo_seminorm(f, ff) == bmo_seminorm(g, cube_family(g)));
  CHECK(bmo_l1_norm(f, ff) == bmo_l1_norm(g, cube_family(g)));
  CHECK(mean_abs_pow(f, 3) == mean_abs_pow(g, 3));
}

TEST_CASE("pointwise bounds on random fields") {
  Rng rng(7);
  std::size_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 8 + t % 9;
    violations += verify_pointwise_bounds(varied_field(n, n, t, rng)).violations;
  }
  CHECK(violations == 0);
  GridField c = rect(4, 4);
  std::fill(c.values.begin(), c.values.end(), 2.0);
  const PointwiseReport r = verify_pointwise_bounds(c);
  CHECK(r.max_abs_violation == 0);
  CHECK(r.max_sharp_violation == -4.0);
}

TEST_CASE("local Fefferman-Stein constant fit") {
  GridField one = rect(4, 4);
  std::fill(one.values.begin(), one.values.end(), 1.0);
  std::vector<GridField> fam{one};
  CHECK(fit_local_fs_constant(fam, 3) == 1.0);

  const GridField half = left_half(8);
  const GridField sharp = brute_force(half).sharp;
  double sharp_sq = 0;
  for (double v : sharp.values) sharp_sq += v * v / 64;
  std::vector<GridField> hf{half};
  CHECK(fit_local_fs_constant(hf, 2) == doctest::Approx(0.5 / (sharp_sq + 0.25)).epsilon(1e-14));

  Rng rng(21);
  std::vector<GridField> random_family;
  double previous = 0;
  for (int t = 0; t < 100; ++t) {
    random_family.push_back(varied_field(8, 8, t, rng));
    const double fit = fit_local_fs_constant(random_family, 3);
    CHECK(std::isfinite(fit));
    CHECK(fit >= previous);
    previous = fit;
  }

  GridField zero = rect(3, 3);
  std::vector<GridField> zeros{zero};
  CHECK_THROWS_AS(fit_local_fs_constant(zeros, 2), Error);
}

TEST_CASE("interpolation and reverse Holder checks") {
  const auto [a, b] = rh_exponents(2, 3);
  CHECK(a == 1.0 / 3.0);
  CHECK(b == 2.0 / 3.0);
  CHECK_THROWS_AS(rh_exponents(3, 3), Error);
  CHECK_THROWS_AS(rh_exponents(4, 3), Error);

  GridField c = rect(5, 5);
  std::fill(c.values.begin(), c.values.end(), -1.5);
  const InterpolationReport rc = verify_interpolation(c, 2, 3, 1.0);
  CHECK(rc.interp_ok);
  CHECK(rc.norm_p == doctest::Approx(rc.interp_rhs).epsilon(1e-14));

  Rng rng(31);
  std::vector<GridField> fam;
  for (int t = 0; t < 1000; ++t) fam.push_back(varied_field(8 + t % 3, 8, t, rng));
  const double j2 = fit_interpolation_constant(fam, 2, 3);
  CHECK(std::isfinite(j2));
  std::size_t interp_bad = 0, rh_bad = 0;
  for (const GridField& f : fam) {
    const InterpolationReport r = verify_interpolation(f, 2, 3, j2);
    interp_bad += !r.interp_ok;
    rh_bad += !r.rh_ok;
  }
  CHECK(interp_bad == 0);
  CHECK(rh_bad == 0);
}

TEST_CASE("maximal operator ratio stays bounded as the family grows") {
  Rng rng(41);
  double small = 0, large = 0;
  for (int t = 0; t < 200; ++t) {
    const double r = hl_ratio(varied_field(10, 10, t, rng), 2);
    CHECK(std::isfinite(r));
    CHECK(r >= 1.0 - 1e-15);
    if (t < 100) small = std::max(small, r);
    large = std::max(large, r);
  }
  CHECK(large <= 1.5 * small);
}

TEST_CASE("grid field text round trip is exact") {
  Rng rng(1);
  GridField f = rect(5, 3, 0.1, 2);
  f.origin = {0.3, -0.7, 0};
  f.mask[f.index(4, 2)] = 0;
  for (std::size_t i = 0; i < f.box_cells(); ++i)
    for (int c = 0; c < 4; ++c) f.at(i, c) = f.inside(i) ? normal(rng) * 1e-3 : 0;
  std::stringstream s;
  write_grid_field(s, f);
  const GridField g = read_grid_field(s);
  CHECK(g.mask == f.mask);
  CHECK(g.values == f.values);
  CHECK(g.spacing == f.spacing);
  CHECK(g.origin == f.origin);

  std::stringstream bad("dims 2 2 2\norigin 0 0\nspacing 1\nmatrix 0\ncells 1\n0 0 nope\n");
  CHECK_THROWS_AS(read_grid_field(bad), Error);
}

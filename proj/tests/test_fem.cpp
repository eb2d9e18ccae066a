#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "rigcert/eigen.hpp"
#include "rigcert/error.hpp"
#include "rigcert/fem.hpp"
#include "rigcert/solver.hpp"
#include "scenarios.hpp"

using namespace rigcert;
using namespace rigcert::testing;

namespace {

double dense_smallest(const SpMat& m, const SpMat& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(m), Eigen::MatrixXd(g)};
  return es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("energy examples") {
  const Mesh mesh = rectangle_mesh(4, 4, 1, 1, "all");
  const StVenantKirchhoff stvk(1, 1);
  CHECK(std::abs(total_energy(stvk, mesh, zero_loads(mesh), identity_field(mesh))) < 1e-28);

  const Mesh free_mesh = rectangle_mesh(4, 4, 1, 1, "none");
  const LoadSet up = make_loads(free_mesh, [](const Vec&) { return vec2(0, 1); }, nullptr, nullptr);
  CHECK(total_energy(stvk, free_mesh, up, identity_field(free_mesh)) == doctest::Approx(-0.5).epsilon(1e-14));

  const FeField twice = interpolate(mesh, [](const Vec& x) { return Vec(2 * x); });
  CHECK(total_energy(stvk, mesh, zero_loads(mesh), twice) == doctest::Approx(9.0).epsilon(1e-14));

  FeField flipped = identity_field(mesh);
  for (std::size_t i = 0; i < mesh.node_count(); ++i) flipped.values(2 * i) *= -1;
  CHECK_THROWS_AS(total_energy(stvk, mesh, zero_loads(mesh), flipped), Error);
}

TEST_CASE("affine field under affine Dirichlet data has zero residual") {
  const Mesh mesh = rectangle_mesh(6, 5, 1.2, 1.0, "all");
  const NeoHookean nh(2, 1);
  const Mat f = mat2(1.1, 0.2, -0.1, 0.95);
  const auto d = [&](const Vec& x) { return Vec(f * x); };
  const LoadSet loads = make_loads(mesh, nullptr, nullptr, d);
  const Eigen::VectorXd r = residual(nh, mesh, loads, interpolate(mesh, d));
  CHECK(r.lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("residual and second variation match finite differences of the energy") {
  const Stretch s(6);
  const DofMap dofs(s.mesh);
  Rng rng(11);
  for (int state = 0; state < 5; ++state) {
    const FeField u = add(s.u_e, random_interior(s.mesh, 0.02, rng));
    const Eigen::VectorXd r = residual(s.material, s.mesh, s.loads, u);
    const Eigen::VectorXd dir = dofs.restrict(random_interior(s.mesh, 1, rng).values);
    const FeField z{2, dofs.extend(dir)};
    const double h = 1e-6;
    const double fd = (total_energy(s.material, s.mesh, s.loads, add(u, z, h)) -
                       total_energy(s.material, s.mesh, s.loads, add(u, z, -h))) / (2 * h);
    CHECK(std::abs(fd - r.dot(dir)) <= 1e-6 * std::abs(fd));

    const SpMat m = second_variation_matrix(s.material, s.mesh, u);
    CHECK((SpMat(m.transpose()) - m).norm() <= 1e-12 * m.norm());
    const double h2 = 1e-4;
    const double fd2 = (total_energy(s.material, s.mesh, s.loads, add(u, z, h2)) - 2 * total_energy(s.material, s.mesh, s.loads, u) +
                        total_energy(s.material, s.mesh, s.loads, add(u, z, -h2))) / (h2 * h2);
    CHECK(std::abs(fd2 - dir.dot(m * dir)) <= 1e-5 * std::abs(fd2));
  }
}

TEST_CASE("second variation is local") {
  const Mesh mesh = rectangle_mesh(4, 4, 1, 1, "all");
  const StVenantKirchhoff stvk(1, 1);
  const FeField u = identity_field(mesh);
  const SpMat m = second_variation_matrix(stvk, mesh, u);
  const DofMap dofs(mesh);
  // centre node (2,2) has index 12 in the row-major numbering
  const long k = dofs.free_index(12 * 2);
  REQUIRE(k >= 0);
  double patch = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int a = 0; a < 4; ++a)
      if (mesh.elements()[e][a] == 12)
        for (int q = 0; q < 4; ++q) {
          const QuadPoint& p = mesh.qp(e, q);
          Mat h = Mat::Zero(2, 2);
          h.row(0) = p.dn.col(a).transpose();
          patch += p.weight * ddot(h, stvk.elasticity_apply(at_point(p.x), Mat::Identity(2, 2), h));
        }
  CHECK(m.coeff(k, k) == doctest::Approx(patch).epsilon(1e-14));
}

TEST_CASE("solver fixed points and homogeneous stretch") {
  const Mesh mesh = rectangle_mesh(16, 16, 1, 1, "all");
  const StVenantKirchhoff stvk(1, 1);
  const SolveResult id = solve_equilibrium(stvk, mesh, zero_loads(mesh), identity_field(mesh));
  CHECK(id.iterations == 0);

  const auto d = [](const Vec& x) { return vec2(1.1 * x(0), x(1)); };
  const LoadSet loads = make_loads(mesh, nullptr, nullptr, d);
  const SolveResult r = solve_equilibrium(stvk, mesh, loads, interpolate(mesh, d));
  CHECK(r.iterations <= 2);
  CHECK(r.residual_inf <= 1e-10);
  CHECK((r.u.values - interpolate(mesh, d).values).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("mixed problem converges with monotone energy") {
  const Mesh mesh = rectangle_mesh(8, 8, 1, 1, "bottom");
  const StVenantKirchhoff stvk(1, 1);
  const LoadSet loads = make_loads(mesh, [](const Vec&) { return vec2(0, -0.01); }, nullptr, nullptr);
  const SolveResult r = solve_equilibrium(stvk, mesh, loads, identity_field(mesh));
  CHECK(r.residual_inf <= 1e-10);
  CHECK(r.energy <= r.log.front().energy);
  for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i].energy <= r.log[i - 1].energy + 1e-15);
  CHECK(min_jacobian(mesh, r.u) > 0);
}

TEST_CASE("Newton keeps iterates admissible on a large stretch") {
  const Mesh mesh = rectangle_mesh(6, 6, 1, 1, "left,right");
  const NeoHookean nh(1, 1);
  const LoadSet loads = make_loads(mesh, nullptr, nullptr, [](const Vec& x) { return vec2(x(0) < 0.5 ? 0.0 : 1.6, x(1)); });
  FeField u0 = identity_field(mesh);
  // initial guess carries the data linearly in x
  for (std::size_t i = 0; i < mesh.node_count(); ++i) u0.values(2 * i) *= 1.6;
  const SolveResult r = solve_equilibrium(nh, mesh, loads, u0);
  CHECK(r.residual_inf <= 1e-10);
  CHECK(min_jacobian(mesh, r.u) > 0);
}

TEST_CASE("boundary mismatch in the initial guess is rejected") {
  const Mesh mesh = rectangle_mesh(2, 2, 1, 1, "all");
  const LoadSet loads = make_loads(mesh, nullptr, nullptr, [](const Vec& x) { return Vec(1.1 * x); });
  CHECK_THROWS_AS(solve_equilibrium(StVenantKirchhoff(1, 1), mesh, loads, identity_field(mesh)), Error);
}

TEST_CASE("generalized eigensolver against the dense oracle") {
  const Mesh mesh = rectangle_mesh(6, 6, 1, 1, "all");
  const SpMat g = gradient_gram(mesh);
  CHECK(coercivity_constant(g, g) == doctest::Approx(1).epsilon(1e-10));
  CHECK(coercivity_constant(SpMat(2 * g), g) == doctest::Approx(2).epsilon(1e-10));

  const StVenantKirchhoff stvk(1, 1);
  const SpMat m = second_variation_matrix(stvk, mesh, identity_field(mesh));
  const GeneralizedEigen ge = smallest_generalized_eigen(m, g);
  CHECK(ge.value == doctest::Approx(dense_smallest(m, g)).epsilon(1e-9));
  CHECK(ge.value >= 1);
  CHECK(ge.value <= 2.5);
  CHECK(ge.certified_lower <= ge.value);
  CHECK(negative_inertia(m, g, ge.certified_lower) == 0);

  // an indefinite pencil: the second variation of a compressed state
  const NeoHookean nh(1, 1);
  const FeField squeezed = interpolate(mesh, [](const Vec& x) { return vec2(0.55 * x(0), x(1)); });
  const SpMat mc = second_variation_matrix(nh, mesh, squeezed);
  const double oracle = dense_smallest(mc, g);
  CHECK(smallest_generalized_eigen(mc, g).value == doctest::Approx(oracle).epsilon(1e-9));

  // a pencil with a deep isolated eigenvalue the first Lanczos pass may miss
  SpMat shifted = m;
  shifted.coeffRef(0, 0) -= 50;
  CHECK(smallest_generalized_eigen(shifted, g).value == doctest::Approx(dense_smallest(shifted, g)).epsilon(1e-9));
}

TEST_CASE("energy identity and mean gradient") {
  const Stretch s(8);
  Rng rng(3);
  for (int k = 0; k < 3; ++k) {
    const FeField v = add(s.u_e, bump(s.mesh, 0.01 * (k + 1), 1 + k, 2, 0.4 * k));
    const IdentityCheck c = energy_identity_check(s.material, s.mesh, s.loads, s.u_e, v, 1e-10);
    CHECK(c.discrepancy <= 1e-10);
    CHECK(c.mean_gradient <= 1e-12);
  }
  const IdentityCheck same = energy_identity_check(s.material, s.mesh, s.loads, s.u_e, s.u_e, 1e-10);
  CHECK(same.discrepancy == 0.0);
  CHECK_THROWS_AS(energy_identity_check(s.material, s.mesh, s.loads, s.u0, s.u_e, 1e-10), Error);
}

TEST_CASE("quadrature grid averages equal quadrature averages") {
  const Stretch s(4);
  const GridField g = gradient_grid(s.mesh, s.u_e);
  CHECK(g.extent[0] == 8);
  CHECK(g.cell_count() == 64);
  const Mat mean = domain_mean(g);
  CHECK((mean - integrated_gradient(s.mesh, s.u_e) / s.mesh.volume()).norm() < 1e-14);

  const Mesh l = l_shape_mesh(4, 1, "outer");
  const GridField gl = gradient_grid(l, identity_field(l));
  CHECK(gl.cell_count() == 48);
  CHECK_THROWS_AS(gradient_grid(rectangle_mesh(2, 2, 2, 1, "all"), identity_field(rectangle_mesh(2, 2, 2, 1, "all"))), Error);
}

TEST_CASE("corner Jacobian catches folds between Gauss points") {
  const Mesh mesh = rectangle_mesh(1, 1, 1, 1, "left");
  FeField u = identity_field(mesh);
  int corner = -1;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (mesh.nodes()[i] == vec2(1, 1)) corner = static_cast<int>(i);
  REQUIRE(corner >= 0);
  u.set(static_cast<std::size_t>(corner), vec2(0.4, 0.4));
  // det at (1,1) of the reference cell is 2a - 1 for the corner moved to (a, a)
  CHECK(min_corner_jacobian(mesh, u) == doctest::Approx(-0.2));
  CHECK(min_jacobian(mesh, u) > 0);
  CHECK(min_corner_jacobian(mesh, identity_field(mesh)) == doctest::Approx(1));

  const StVenantKirchhoff m(1, 1);
  const LoadSet loads = zero_loads(mesh);
  CHECK(code_of([&] { solve_equilibrium(m, mesh, loads, u, {.corner_det_check = true}); }) ==
        ErrorCode::DeterminantViolation);
  const SolveResult r = solve_equilibrium(m, mesh, loads, identity_field(mesh), {.corner_det_check = true});
  CHECK(r.residual_inf <= 1e-14);
}

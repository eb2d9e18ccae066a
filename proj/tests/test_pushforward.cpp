#include <cmath>

#include "doctest.h"
#include "rigcert/error.hpp"
#include "rigcert/pushforward.hpp"
#include "scenarios.hpp"

using namespace rigcert;
using namespace rigcert::testing;

namespace {

const Mat kShear = mat2(1, 0.3, 0, 1);

FeField affine(const Mesh& mesh, const Mat& f) {
  return interpolate(mesh, [&](const Vec& x) { return Vec(f * x); });
}

FeField random_field(const Mesh& mesh, double amp, Rng& rng) {
  FeField w{mesh.dim(), Eigen::VectorXd(static_cast<Eigen::Index>(mesh.dof_count()))};
  for (Eigen::Index i = 0; i < w.values.size(); ++i) w.values(i) = amp * uniform(rng, -1, 1);
  return w;
}

}  // namespace

TEST_CASE("identity configuration round trip") {
  const Mesh mesh = rectangle_mesh(4, 3, 1, 0.75, "left");
  const LoadSet loads = make_loads(
      mesh, [](const Vec& x) { return vec2(x(1), -1); }, [](const Vec& x, const Vec& n) { return Vec(x(0) * n); }, nullptr);
  const DeformedConfig cfg = deform_configuration(mesh, identity_field(mesh));
  CHECK(cfg.mesh.nodes() == mesh.nodes());
  CHECK(mesh_hash(cfg.mesh) == mesh_hash(mesh));
  const LoadSet lu = pushforward_loads(mesh, loads, cfg);
  for (std::size_t k = 0; k < lu.body.size(); ++k) CHECK((lu.body[k] - loads.body[k]).norm() <= 1e-14 * loads.body[k].norm());
  for (std::size_t k = 0; k < lu.traction.size(); ++k)
    CHECK((lu.traction[k] - loads.traction[k]).norm() <= 1e-14 * (1 + loads.traction[k].norm()));
  CHECK(lu.dirichlet == loads.dirichlet);

  const NeoHookean nh(1.5, 0.7);
  const PushedMaterial pm(nh, cfg);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const Mat g = random_with_singular_values(2, 0.5, 2, rng);
    const Mat h = random_unit_matrix(2, rng);
    const MaterialPoint p{cfg.mesh.qp(3, 1).x, 3, 1};
    // grad of the identity field is I up to roundoff
    CHECK(pm.energy(p, g) == doctest::Approx(nh.energy(p, g)).epsilon(1e-14));
    CHECK(fnorm(pm.stress(p, g) - nh.stress(p, g)) <= 1e-14 * fnorm(nh.stress(p, g)));
    CHECK(fnorm(pm.elasticity_apply(p, g, h) - nh.elasticity_apply(p, g, h)) <= 1e-14 * fnorm(nh.elasticity_apply(p, g, h)));
  }
}

TEST_CASE("shear configuration") {
  const Mesh mesh = rectangle_mesh(6, 6, 1, 1, "all");
  const DeformedConfig cfg = deform_configuration(mesh, affine(mesh, kShear));
  for (double d : cfg.det_f) CHECK(std::abs(d - 1) < 1e-14);
  CHECK(cfg.inverse_residual <= 1e-10);
  CHECK(cfg.mesh.volume() == doctest::Approx(1).epsilon(1e-14));
  CHECK(cfg.forward[7](0) == doctest::Approx(mesh.nodes()[7](0) + 0.3 * mesh.nodes()[7](1)));
}

TEST_CASE("pushed material formulas") {
  const Stretch s(4);
  const DeformedConfig cfg = deform_configuration(s.mesh, s.u_e);
  const StVenantKirchhoff& m = s.material;
  const PushedMaterial pm(m, cfg);
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const std::size_t e = k % cfg.mesh.element_count();
    const int q = k % 4;
    const MaterialPoint py{cfg.mesh.qp(e, q).x, static_cast<long>(e), q};
    const MaterialPoint px{s.mesh.qp(e, q).x, static_cast<long>(e), q};
    const Mat f = cfg.f[e * 4 + q];
    const double det = f.determinant();
    const Mat g = random_with_singular_values(2, 0.7, 1.4, rng);
    const Mat h = random_unit_matrix(2, rng);
    CHECK(pm.energy(py, g) == doctest::Approx(m.energy(px, g * f) / det).epsilon(1e-14));
    CHECK(ddot(pm.stress(py, g), h) == doctest::Approx(ddot(m.stress(px, g * f), h * f) / det).epsilon(1e-12));
    const double closed = ddot(h, pm.elasticity_apply(py, g, h));
    CHECK(closed == doctest::Approx(ddot(h * f, m.elasticity_apply(px, g * f, h * f)) / det).epsilon(1e-10));
    CHECK(closed == doctest::Approx(ddot(h, fd_elasticity_apply(pm, py, g, h))).epsilon(1e-6));
    CHECK(fnorm(pm.stress(py, g) - fd_stress(pm, py, g)) <= 1e-6 * (1 + fnorm(pm.stress(py, g))));
    // without element data the point is located by position
    CHECK(pm.energy({py.x, -1, -1}, g) == pm.energy(py, g));
  }
}

TEST_CASE("uniform dilation scales loads") {
  const Mesh mesh = rectangle_mesh(3, 3, 1, 1, "left");
  const LoadSet loads = make_loads(
      mesh, [](const Vec&) { return vec2(1, -2); }, [](const Vec&, const Vec&) { return vec2(0.5, 1); }, nullptr);
  const DeformedConfig cfg = deform_configuration(mesh, affine(mesh, Mat(2 * identity(2))));
  const LoadSet lu = pushforward_loads(mesh, loads, cfg);
  for (std::size_t k = 0; k < lu.body.size(); ++k) CHECK((lu.body[k] - loads.body[k] / 4).norm() < 1e-15);
  for (std::size_t k = 0; k < lu.traction.size(); ++k) CHECK((lu.traction[k] - loads.traction[k] / 2).norm() < 1e-15);
}

TEST_CASE("change-of-variables identities under an affine shear") {
  const Mesh mesh = rectangle_mesh(8, 8, 1, 1, "left,bottom");
  const auto d = [](const Vec& x) { return Vec(kShear * x); };
  const LoadSet loads = make_loads(
      mesh, [](const Vec& x) { return vec2(x(1), -0.2); }, [](const Vec& x, const Vec& n) { return vec2(0.3 + x(0), 0.1 * n(0)); }, d);
  const NeoHookean nh(1, 1);
  Rng rng(21);
  for (int k = 0; k < 3; ++k) {
    const FeField u_e = interpolate(mesh, d);
    const FeField v = add(u_e, random_field(mesh, 0.01, rng));
    const FeField w = random_field(mesh, 1, rng);
    const CovReport r = verify_cov_identities(nh, mesh, loads, u_e, v, w);
    for (const CovLine& line : r.lines) CHECK(line.relative <= 1e-10);
    CHECK(r.lines[4].lhs != 0);
  }
  const CovReport id = verify_cov_identities(nh, mesh, loads, identity_field(mesh), identity_field(mesh), random_field(mesh, 1, rng));
  CHECK(id.max_relative <= 1e-15);
}

TEST_CASE("curved equilibrium: exact transport is exact, recovered transport converges") {
  double prev = 0;
  for (int cells : {8, 16, 32}) {
    const Stretch s(cells);
    const DeformedConfig cfg = deform_configuration(s.mesh, s.u_e);
    CHECK(cfg.min_det > 0);
    CHECK(cfg.inverse_residual <= 1e-10);
    const auto fam = random_smooth_family(s.mesh, 2, 0.01, 5);
    const FeField v = add(s.u_e, fam[0]);
    CHECK(verify_cov_identities(s.material, s.mesh, s.loads, s.u_e, v, fam[1]).max_relative <= 1e-12);
    const double rec = verify_cov_identities(s.material, s.mesh, s.loads, s.u_e, v, fam[1], Transport::Recovered).max_relative;
    CHECK(rec > 0);
    if (prev > 0) CHECK(prev / rec >= 3);
    prev = rec;
  }
}

TEST_CASE("strain difference against distance to rotations") {
  const Mesh mesh = rectangle_mesh(6, 6, 1, 1, "all");
  const FeField sh = affine(mesh, kShear);
  const StrainDistReport same = strain_diff_to_dist(mesh, sh, sh);
  CHECK(same.d_sup < 1e-7);
  CHECK(same.strain_diff_sup < 1e-14);
  CHECK(same.upsilon_max == doctest::Approx(std::sqrt(2.09)).epsilon(1e-14));
  CHECK(same.upsilon_min == doctest::Approx(1 / std::sqrt(2.09)).epsilon(1e-14));

  // v = Q(x) u_e with a slowly varying rotation plus a smooth bump: 10^4 points
  const Mesh fine = rectangle_mesh(50, 50, 1, 1, "all");
  const FeField ue = add(affine(fine, kShear), bump(fine, 0.02, 1, 1));
  const FeField v = interpolate(fine, [](const Vec& x) {
    return Vec(rotation2(0.05 * std::sin(3 * x(0) + x(1))) * (kShear * x));
  });
  const StrainDistReport r = strain_diff_to_dist(fine, ue, v);
  CHECK(r.points.size() == 10000);
  CHECK(r.violations == 0);
  CHECK(r.d_sup > 0);
  CHECK(r.upsilon_min <= r.upsilon_max);
}

TEST_CASE("deform_configuration errors") {
  const Mesh mesh = rectangle_mesh(2, 2, 1, 1, "all");
  FeField flipped = identity_field(mesh);
  for (std::size_t i = 0; i < mesh.node_count(); ++i) flipped.values(2 * i) *= -1;
  CHECK(code_of([&] { deform_configuration(mesh, flipped); }) == ErrorCode::DeterminantViolation);

  // pull the far corner of one element inward: positive at the Gauss points,
  // folded at the corner
  const Mesh one = rectangle_mesh(1, 1, 1, 1, "all");
  FeField fold = identity_field(one);
  for (std::size_t i = 0; i < one.node_count(); ++i)
    if (one.nodes()[i](0) == 1 && one.nodes()[i](1) == 1) fold.set(i, vec2(0.4, 0.4));
  bool gauss_positive = true;
  for (int q = 0; q < 4; ++q) gauss_positive = gauss_positive && gradient(one, fold, 0, q).determinant() > 0;
  REQUIRE(gauss_positive);
  CHECK(code_of([&] { deform_configuration(one, fold); }) == ErrorCode::NotInjective);
}

TEST_CASE("strain-neighborhood certificate on a shear equilibrium") {
  const Mesh mesh = rectangle_mesh(8, 8, 1, 1, "all");
  const StVenantKirchhoff m(1, 1);
  const auto d = [](const Vec& x) { return Vec(kShear * x); };
  const LoadSet loads = make_loads(mesh, nullptr, nullptr, d);
  const FeField u_e = interpolate(mesh, d);
  const Problem pr{m, mesh, loads};
  CertifyOptions opt;
  opt.problem_id = "shear-8";
  opt.taylor.samples = 2000;
  opt.taylor.refine_starts = 4;
  opt.family_size = 8;
  const std::vector<FeField> cands{u_e, add(u_e, bump(mesh, 1e-4, 1, 1)), add(u_e, bump(mesh, 0.2, 2, 1))};
  const Certificate cert = certify_strain_neighborhood(pr, u_e, cands, opt);
  CHECK(cert.configuration == "deformed");
  CHECK(cert.measurements.at("deformed.identity_gradient").pass);
  CHECK(cert.measurements.at("deformed.residual_inf").pass);
  CHECK(cert.measurements.at("cov.excess_mismatch").pass);
  REQUIRE(cert.candidates.size() == 3);
  CHECK(cert.candidates[0].outcome == GateOutcome::Pass);
  CHECK(cert.candidates[0].gate->gap == 0);
  const CandidateResult& gated = cert.candidates[1];
  CHECK(gated.outcome == GateOutcome::Pass);
  const double ref = gated.extra["reference_energy_excess"].get<double>();
  const double def = gated.extra["deformed_energy_excess"].get<double>();
  CHECK(ref > 0);
  CHECK(def > 0);
  CHECK(std::abs(ref - def) <= 1e-10 * (1 + std::abs(ref)));
  CHECK(cert.candidates[2].outcome == GateOutcome::Inapplicable);
  CHECK(cert.verdict() == GateOutcome::Inapplicable);
  const Json j = to_json(cert);
  CHECK(j["configuration"] == "deformed");
  CHECK(j["extra"]["cov_identities"]["exact"]["max_relative"].get<double>() <= 1e-10);
}

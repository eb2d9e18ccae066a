#include "rigcert/rigidity.hpp"

#include <cmath>

#include "rigcert/error.hpp"
#include "rigcert/parallel.hpp"

namespace rigcert {

namespace {

Mat polar_rotation_of_mean(const Mat& g) {
  if (!(g.determinant() > 0)) fail(ErrorCode::DegenerateMean, "mean gradient has non-positive determinant");
  return polar_decompose(g).R;
}

// Pointwise distances below this are roundoff: a rigid motion sampled on a
// mesh has dist ~ 1e-16, and ratios of such values are meaningless.
double roundoff_floor(const Mat& g) { return 1e-13 * (1 + fnorm(g)); }

double floored(double d, const Mat& g) { return d < roundoff_floor(g) ? 0 : d; }

double avg_distance_pow(const GridField& grad, const Mat& r, double p) {
  double s = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < grad.box_cells(); ++i)
    if (grad.inside(i)) {
      const Mat g = grad.matrix(i);
      s += std::pow(floored(fnorm(g - r), g), p), ++count;
    }
  return s / static_cast<double>(count);
}

// Rotation by exp of the skew matrix with the given parameters.
Mat rotation_exp(int n, const Vec& a) {
  if (n == 2) return rotation2(a(0));
  const double t = a.norm();
  if (t == 0) return Mat::Identity(3, 3);
  const Vec k = a / t;
  Mat kx(3, 3);
  kx << 0, -k(2), k(1), k(2), 0, -k(0), -k(1), k(0), 0;
  return Mat::Identity(3, 3) + std::sin(t) * kx + (1 - std::cos(t)) * kx * kx;
}

}  // namespace

Mat best_rotation(const GridField& grad) {
  if (grad.matrix_dim == 0) fail(ErrorCode::DimensionMismatch, "best_rotation needs a matrix field");
  return polar_rotation_of_mean(domain_mean(grad));
}

Mat best_rotation(const Mesh& mesh, const FeField& u) {
  return polar_rotation_of_mean(integrated_gradient(mesh, u) / mesh.volume());
}

Mat best_rotation_p(const GridField& grad, double p) {
  const int n = grad.matrix_dim;
  Mat r = best_rotation(grad);
  double best = avg_distance_pow(grad, r, p);
  const int params = n == 2 ? 1 : 3;
  // Coordinate pattern search on the rotation manifold.
  for (double step = 0.05; step > 1e-10; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int k = 0; k < params; ++k)
        for (double sgn : {1.0, -1.0}) {
          Vec a = Vec::Zero(params);
          a(k) = sgn * step;
          const Mat trial = r * rotation_exp(n, a);
          const double v = avg_distance_pow(grad, trial, p);
          if (v < best) best = v, r = trial, improved = true;
        }
    }
  }
  return r;
}

RigidityReport rigidity_fit(const GridField& grad, double p) {
  if (!(p > 1) || !std::isfinite(p)) fail(ErrorCode::BadExponents, "rigidity exponent must lie in (1, inf)");
  RigidityReport out;
  out.p = p;
  out.r_best = best_rotation(grad);
  std::vector<double> dist(grad.box_cells(), 0.0);
  parallel_for(grad.box_cells(), [&](std::size_t i) {
    if (grad.inside(i)) dist[i] = floored(dist_to_rotations(grad.matrix(i)), grad.matrix(i));
  });
  double rhs = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < grad.box_cells(); ++i)
    if (grad.inside(i)) rhs += std::pow(dist[i], p), out.dist_sup = std::max(out.dist_sup, dist[i]), ++count;
  out.rhs_p = rhs / static_cast<double>(count);
  out.lhs_p = avg_distance_pow(grad, out.r_best, p);
  out.lhs_p_optimal = p == 2 ? out.lhs_p : avg_distance_pow(grad, best_rotation_p(grad, p), p);
  if (out.rhs_p > 0)
    out.c_emp = std::pow(out.lhs_p / out.rhs_p, 1 / p);
  else if (out.lhs_p > 0)
    out.c_emp = INFINITY, out.c_infinite = true;
  out.bmo_seminorm = bmo_seminorm(grad, cube_family(grad));
  double gmax = 0;
  for (std::size_t i = 0; i < grad.box_cells(); ++i)
    if (grad.inside(i)) gmax = std::max(gmax, fnorm(grad.matrix(i)));
  if (out.bmo_seminorm < 1e-13 * (1 + gmax)) out.bmo_seminorm = 0;
  if (out.dist_sup > 0)
    out.m_emp = out.bmo_seminorm / out.dist_sup;
  else if (out.bmo_seminorm > 0)
    out.m_emp = INFINITY, out.m_infinite = true;
  return out;
}

BoundaryClosenessReport boundary_rotation_closeness(const Mesh& mesh, const FeField& u1, const FeField& u2, double p) {
  if (!(p > mesh.dim()))
    fail(ErrorCode::ConfigError, "boundary rotation closeness needs p > n (the rotation-closeness hypothesis)");
  for (int node : mesh.dirichlet_nodes())
    if ((u1.at(node) - u2.at(node)).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::BoundaryMismatch, "fields differ on D at node " + std::to_string(node));
  BoundaryClosenessReport out;
  out.r1 = best_rotation(mesh, u1);
  out.r2 = best_rotation(mesh, u2);
  double rot1 = 0, rot2 = 0, d1 = 0, d2 = 0, l1 = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const double w = mesh.qp(e, q).weight;
      const Mat g1 = gradient(mesh, u1, e, q), g2 = gradient(mesh, u2, e, q);
      rot1 += w * std::pow(fnorm(g1 - out.r1), p);
      rot2 += w * std::pow(fnorm(g2 - out.r2), p);
      d1 += w * std::pow(dist_to_rotations(g1), p);
      d2 += w * std::pow(dist_to_rotations(g2), p);
      l1 += w * fnorm(g1 - g2);
    }
  out.rotation_gap = fnorm(out.r1 - out.r2);
  out.rotation_rhs = std::pow(rot1, 1 / p) + std::pow(rot2, 1 / p);
  out.gradient_l1 = l1;
  out.dist_rhs = std::pow(d1, 1 / p) + std::pow(d2, 1 / p);
  out.a_rotation = out.rotation_rhs > 0 ? out.rotation_gap / out.rotation_rhs : 0;
  out.a_l1 = out.dist_rhs > 0 ? out.gradient_l1 / out.dist_rhs : (out.gradient_l1 > 0 ? INFINITY : 0);
  return out;
}

KornReport korn_constant(const Mesh& mesh, const std::function<Mat(const Vec& x)>& f) {
  if (mesh.dirichlet_facets().empty()) fail(ErrorCode::ConfigError, "Korn constant needs a nonempty Dirichlet part");
  const int nq = mesh.qp_per_element();
  std::vector<Mat> fs(mesh.element_count() * nq);
  KornReport out;
  out.min_det = INFINITY;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < nq; ++q) {
      fs[e * nq + q] = f(mesh.qp(e, q).x);
      out.min_det = std::min(out.min_det, fs[e * nq + q].determinant());
    }
  if (!(out.min_det >= 1e-8)) fail(ErrorCode::DetBelowFloor, "min det F = " + std::to_string(out.min_det));
  // |F^T H + H^T F|^2 is the quadratic form of H -> 2 F (F^T H + H^T F).
  const SpMat k = assemble_form(mesh, [&](std::size_t e, int q, const Mat& h) {
    const Mat& fm = fs[e * nq + q];
    const Mat s = fm.transpose() * h + h.transpose() * fm;
    return Mat(2 * fm * s);
  });
  const GeneralizedEigen ge = smallest_generalized_eigen(k, gradient_gram(mesh));
  out.k = ge.value;
  out.certified_lower = ge.certified_lower;
  out.residual = ge.residual;
  out.iterations = ge.iterations;
  return out;
}

}  // namespace rigcert

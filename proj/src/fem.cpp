#include "rigcert/fem.hpp"

#include <cmath>

#include "rigcert/error.hpp"
#include "rigcert/parallel.hpp"

namespace rigcert {

namespace {

MaterialPoint point_of(const QuadPoint& p, std::size_t e, int q) {
  return MaterialPoint{p.x, static_cast<long>(e), q};
}

void check_det(const Mat& f, std::size_t e, int q) {
  const double det = f.determinant();
  if (!(det > 0))
    fail(ErrorCode::DeterminantViolation, "det grad u = " + std::to_string(det) + " at element " + std::to_string(e) +
                                              " point " + std::to_string(q));
}

}  // namespace

FeField interpolate(const Mesh& mesh, const std::function<Vec(const Vec&)>& f) {
  FeField u;
  u.dim = mesh.dim();
  u.values.resize(static_cast<Eigen::Index>(mesh.dof_count()));
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const Vec v = f(mesh.nodes()[i]);
    if (v.size() != mesh.dim()) fail(ErrorCode::DimensionMismatch, "field value has wrong dimension");
    u.set(i, v);
  }
  return u;
}

FeField identity_field(const Mesh& mesh) {
  return interpolate(mesh, [](const Vec& x) { return x; });
}

Mat gradient(const Mesh& mesh, const FeField& u, std::size_t e, int q) {
  const QuadPoint& p = mesh.qp(e, q);
  const int n = mesh.dim();
  Mat g = Mat::Zero(n, n);
  const auto& el = mesh.elements()[e];
  for (int a = 0; a < mesh.nodes_per_element(); ++a) g += u.at(el[a]) * p.dn.col(a).transpose();
  return g;
}

Vec value(const Mesh& mesh, const FeField& u, std::size_t e, int q) {
  const QuadPoint& p = mesh.qp(e, q);
  Vec v = Vec::Zero(mesh.dim());
  const auto& el = mesh.elements()[e];
  for (int a = 0; a < mesh.nodes_per_element(); ++a) v += p.n(a) * u.at(el[a]);
  return v;
}

LoadSet make_loads(const Mesh& mesh, const BodyFn& body, const TractionFn& traction, const PlacementFn& d) {
  const int n = mesh.dim();
  LoadSet l;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) l.body.push_back(body ? body(mesh.qp(e, q).x) : Vec::Zero(n));
  for (std::size_t t = 0; t < mesh.traction_facets().size(); ++t)
    for (int q = 0; q < mesh.qp_per_facet(); ++q) {
      const FacetPoint& p = mesh.traction_qp(t, q);
      l.traction.push_back(traction ? traction(p.x, p.normal) : Vec::Zero(n));
    }
  for (int node : mesh.dirichlet_nodes()) l.dirichlet.push_back(d ? d(mesh.nodes()[node]) : mesh.nodes()[node]);
  for (const auto* list : {&l.body, &l.traction, &l.dirichlet})
    for (const Vec& v : *list)
      if (v.size() != n || !v.allFinite()) fail(ErrorCode::ConfigError, "load values must be finite vectors of the mesh dimension");
  return l;
}

LoadSet zero_loads(const Mesh& mesh) { return make_loads(mesh, nullptr, nullptr, nullptr); }

void apply_dirichlet(const Mesh& mesh, const LoadSet& loads, FeField& u) {
  const auto& nodes = mesh.dirichlet_nodes();
  if (loads.dirichlet.size() != nodes.size()) fail(ErrorCode::DimensionMismatch, "Dirichlet data size differs from D nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) u.set(nodes[i], loads.dirichlet[i]);
}

double dirichlet_mismatch(const Mesh& mesh, const LoadSet& loads, const FeField& u) {
  const auto& nodes = mesh.dirichlet_nodes();
  double worst = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) worst = std::max(worst, (u.at(nodes[i]) - loads.dirichlet[i]).cwiseAbs().maxCoeff());
  return worst;
}

DofMap::DofMap(const Mesh& mesh) : index_(mesh.dof_count(), -1) {
  const int n = mesh.dim();
  for (std::size_t node = 0; node < mesh.node_count(); ++node) {
    if (mesh.is_dirichlet_node(static_cast<int>(node))) continue;
    for (int i = 0; i < n; ++i) {
      index_[node * n + i] = static_cast<long>(free_.size());
      free_.push_back(node * n + i);
    }
  }
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) r(k) = full(free_[k]);
  return r;
}

Eigen::VectorXd DofMap::extend(const Eigen::VectorXd& free) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) full(free_[k]) = free(k);
  return full;
}

double total_energy(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u) {
  const int nq = mesh.qp_per_element();
  std::vector<double> per(mesh.element_count());
  parallel_for(mesh.element_count(), [&](std::size_t e) {
    double s = 0;
    for (int q = 0; q < nq; ++q) {
      const QuadPoint& p = mesh.qp(e, q);
      const Mat f = gradient(mesh, u, e, q);
      check_det(f, e, q);
      s += p.weight * (m.energy(point_of(p, e, q), f) - loads.body[e * nq + q].dot(value(mesh, u, e, q)));
    }
    per[e] = s;
  });
  double total = 0;
  for (double s : per) total += s;
  const int nf = mesh.qp_per_facet();
  for (std::size_t t = 0; t < mesh.traction_facets().size(); ++t) {
    const Facet& f = mesh.facets()[mesh.traction_facets()[t]];
    for (int q = 0; q < nf; ++q) {
      const FacetPoint& p = mesh.traction_qp(t, q);
      Vec uv = Vec::Zero(mesh.dim());
      for (int a = 0; a < mesh.nodes_per_element(); ++a) uv += p.n(a) * u.at(mesh.elements()[f.element][a]);
      total -= p.weight * loads.traction[t * nf + q].dot(uv);
    }
  }
  return total;
}

Eigen::VectorXd full_residual(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u) {
  const int n = mesh.dim(), nen = mesh.nodes_per_element(), nq = mesh.qp_per_element();
  std::vector<Eigen::VectorXd> per(mesh.element_count());
  parallel_for(mesh.element_count(), [&](std::size_t e) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nen * n);
    for (int q = 0; q < nq; ++q) {
      const QuadPoint& p = mesh.qp(e, q);
      const Mat f = gradient(mesh, u, e, q);
      check_det(f, e, q);
      const Mat s = m.stress(point_of(p, e, q), f);
      const Vec& b = loads.body[e * nq + q];
      for (int a = 0; a < nen; ++a) r.segment(a * n, n) += p.weight * (s * p.dn.col(a) - p.n(a) * b);
    }
    per[e] = std::move(r);
  });
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int a = 0; a < nen; ++a) full.segment(mesh.elements()[e][a] * n, n) += per[e].segment(a * n, n);
  const int nf = mesh.qp_per_facet();
  for (std::size_t t = 0; t < mesh.traction_facets().size(); ++t) {
    const Facet& f = mesh.facets()[mesh.traction_facets()[t]];
    for (int q = 0; q < nf; ++q) {
      const FacetPoint& p = mesh.traction_qp(t, q);
      for (int a = 0; a < nen; ++a)
        full.segment(mesh.elements()[f.element][a] * n, n) -= p.weight * p.n(a) * loads.traction[t * nf + q];
    }
  }
  return full;
}

Eigen::VectorXd residual(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u) {
  return DofMap(mesh).restrict(full_residual(m, mesh, loads, u));
}

SpMat assemble_form(const Mesh& mesh, const std::function<Mat(std::size_t e, int q, const Mat& h)>& op) {
  const int n = mesh.dim(), nen = mesh.nodes_per_element(), nq = mesh.qp_per_element();
  const int ndof = nen * n;
  std::vector<Eigen::MatrixXd> per(mesh.element_count());
  parallel_for(mesh.element_count(), [&](std::size_t e) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(ndof, ndof);
    for (int q = 0; q < nq; ++q) {
      const QuadPoint& p = mesh.qp(e, q);
      for (int a = 0; a < nen; ++a)
        for (int i = 0; i < n; ++i) {
          Mat h = Mat::Zero(n, n);
          h.row(i) = p.dn.col(a).transpose();
          const Mat ah = op(e, q, h);
          for (int b = 0; b < nen; ++b) k.block(b * n, a * n + i, n, 1) += p.weight * ah * p.dn.col(b);
        }
    }
    per[e] = 0.5 * (k + k.transpose());
  });
  const DofMap dofs(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.element_count() * ndof * ndof);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements()[e];
    for (int a = 0; a < ndof; ++a) {
      const long ra = dofs.free_index(el[a / n] * n + a % n);
      if (ra < 0) continue;
      for (int b = 0; b < ndof; ++b) {
        const long rb = dofs.free_index(el[b / n] * n + b % n);
        if (rb >= 0) trip.emplace_back(ra, rb, per[e](a, b));
      }
    }
  }
  const auto nfree = static_cast<Eigen::Index>(dofs.free_count());
  SpMat k(nfree, nfree);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

SpMat second_variation_matrix(const Material& m, const Mesh& mesh, const FeField& u) {
  const int nq = mesh.qp_per_element();
  std::vector<Mat> grads(mesh.element_count() * nq);
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < nq; ++q) {
      grads[e * nq + q] = gradient(mesh, u, e, q);
      check_det(grads[e * nq + q], e, q);
    }
  return assemble_form(mesh, [&](std::size_t e, int q, const Mat& h) {
    return m.elasticity_apply(point_of(mesh.qp(e, q), e, q), grads[e * nq + q], h);
  });
}

SpMat gradient_gram(const Mesh& mesh) {
  return assemble_form(mesh, [](std::size_t, int, const Mat& h) { return h; });
}

double min_jacobian(const Mesh& mesh, const FeField& u) {
  double worst = INFINITY;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const Mat f = gradient(mesh, u, e, q);
      check_det(f, e, q);
      worst = std::min(worst, f.determinant());
    }
  return worst;
}

double min_corner_jacobian(const Mesh& mesh, const FeField& u) {
  double worst = INFINITY;
  Vec x;
  ShapeVal n;
  ShapeGrad dn;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements()[e];
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      mesh.map(e, reference_corner(mesh.dim(), a), x, n, dn);
      Mat f = Mat::Zero(mesh.dim(), mesh.dim());
      for (int b = 0; b < mesh.nodes_per_element(); ++b) f += u.at(el[b]) * dn.col(b).transpose();
      worst = std::min(worst, f.determinant());
    }
  }
  return worst;
}

Mat integrated_gradient(const Mesh& mesh, const FeField& w) {
  Mat s = Mat::Zero(mesh.dim(), mesh.dim());
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) s += mesh.qp(e, q).weight * gradient(mesh, w, e, q);
  return s;
}

double gradient_norm(const Mesh& mesh, const FeField& w, double p) {
  double s = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) s += mesh.qp(e, q).weight * std::pow(fnorm(gradient(mesh, w, e, q)), p);
  return std::pow(s, 1 / p);
}

double gradient_sup(const Mesh& mesh, const FeField& w) {
  double s = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) s = std::max(s, fnorm(gradient(mesh, w, e, q)));
  return s;
}

IdentityCheck energy_identity_check(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u_e,
                                    const FeField& v, double tol) {
  IdentityCheck out;
  out.residual_inf = residual(m, mesh, loads, u_e).lpNorm<Eigen::Infinity>();
  if (out.residual_inf > tol)
    fail(ErrorCode::NotEquilibrium, "residual " + std::to_string(out.residual_inf) + " exceeds " + std::to_string(tol));
  for (int node : mesh.dirichlet_nodes())
    if ((v.at(node) - u_e.at(node)).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::BoundaryMismatch, "v differs from u_e on D at node " + std::to_string(node));
  FeField w{v.dim, v.values - u_e.values};
  out.lhs = total_energy(m, mesh, loads, v) - total_energy(m, mesh, loads, u_e);
  double rhs = 0, l1 = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const QuadPoint& p = mesh.qp(e, q);
      const MaterialPoint mp = point_of(p, e, q);
      const Mat fu = gradient(mesh, u_e, e, q), fv = gradient(mesh, v, e, q), gw = gradient(mesh, w, e, q);
      rhs += p.weight * (m.energy(mp, fv) - m.energy(mp, fu) - ddot(m.stress(mp, fu), gw));
      l1 += p.weight * fnorm(gw);
    }
  out.rhs = rhs;
  out.discrepancy = std::abs(out.lhs - out.rhs);
  out.grad_w_l1 = l1;
  out.mean_gradient = fnorm(integrated_gradient(mesh, w));
  return out;
}

GridField quadrature_grid(const Mesh& mesh, int matrix_dim, const std::function<Mat(std::size_t e, int q)>& value) {
  const auto& lat = mesh.lattice();
  if (!lat) fail(ErrorCode::ConfigError, "gradient grids need a mesh of equal axis-aligned cells");
  const int n = mesh.dim();
  std::array<int, 3> extent{2 * lat->extent[0], 2 * lat->extent[1], n == 3 ? 2 * lat->extent[2] : 1};
  GridField g = GridField::box(n, extent, lat->spacing / 2, matrix_dim);
  g.origin = lat->origin;
  std::fill(g.mask.begin(), g.mask.end(), 0);
  const double half = lat->spacing / 2;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const Vec& x = mesh.qp(e, q).x;
      std::array<int, 3> s{0, 0, 0};
      for (int d = 0; d < n; ++d) {
        s[d] = static_cast<int>(std::floor((x(d) - lat->origin[d]) / half));
        s[d] = std::clamp(s[d], 2 * lat->cell[e][d], 2 * lat->cell[e][d] + 1);
      }
      const std::size_t idx = g.index(s[0], s[1], s[2]);
      g.mask[idx] = 1;
      const Mat v = value(e, q);
      if (matrix_dim == 0)
        g.at(idx) = v(0, 0);
      else
        g.set_matrix(idx, v);
    }
  return g;
}

GridField gradient_grid(const Mesh& mesh, const FeField& u) {
  return quadrature_grid(mesh, mesh.dim(), [&](std::size_t e, int q) { return gradient(mesh, u, e, q); });
}

}  // namespace rigcert

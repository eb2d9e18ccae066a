#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rigcert/harmonic.hpp"
#include "rigcert/material.hpp"
#include "rigcert/mesh.hpp"

namespace rigcert {

using SpMat = Eigen::SparseMatrix<double>;

// Nodal vector field; dof node*n + i holds component i at node `node`.
struct FeField {
  int dim = 2;
  Eigen::VectorXd values;

  std::size_t node_count() const { return static_cast<std::size_t>(values.size()) / dim; }
  Vec at(std::size_t node) const { return values.segment(node * dim, dim); }
  void set(std::size_t node, const Vec& v) { values.segment(node * dim, dim) = v; }
};

FeField interpolate(const Mesh& mesh, const std::function<Vec(const Vec&)>& f);
FeField identity_field(const Mesh& mesh);
// grad u at quadrature point q of element e.
Mat gradient(const Mesh& mesh, const FeField& u, std::size_t e, int q);
// Value of u at quadrature point q of element e.
Vec value(const Mesh& mesh, const FeField& u, std::size_t e, int q);

// Dead loads. body: one vector per element quadrature point (element-major);
// traction: one vector per traction-facet quadrature point; dirichlet: one
// vector per entry of mesh.dirichlet_nodes().
struct LoadSet {
  std::vector<Vec> body;
  std::vector<Vec> traction;
  std::vector<Vec> dirichlet;
};

using BodyFn = std::function<Vec(const Vec& x)>;
using TractionFn = std::function<Vec(const Vec& x, const Vec& normal)>;
using PlacementFn = std::function<Vec(const Vec& x)>;

// Null body/traction functions mean zero; a null placement means identity.
LoadSet make_loads(const Mesh& mesh, const BodyFn& body, const TractionFn& traction, const PlacementFn& d);
LoadSet zero_loads(const Mesh& mesh);

// Copies the Dirichlet data onto the D nodes of u.
void apply_dirichlet(const Mesh& mesh, const LoadSet& loads, FeField& u);
// Largest nodal mismatch between u and the Dirichlet data.
double dirichlet_mismatch(const Mesh& mesh, const LoadSet& loads, const FeField& u);

// Free dofs are the components at nodes not touching a Dirichlet facet.
class DofMap {
 public:
  explicit DofMap(const Mesh& mesh);
  std::size_t free_count() const { return free_.size(); }
  // -1 for constrained dofs.
  long free_index(std::size_t dof) const { return index_[dof]; }
  const std::vector<std::size_t>& free_dofs() const { return free_; }
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
  // Scatters free values into a full vector that is zero on constrained dofs.
  Eigen::VectorXd extend(const Eigen::VectorXd& free) const;

 private:
  std::vector<long> index_;
  std::vector<std::size_t> free_;
};

// Quadrature approximation of int W(x, grad u) - b.u dx - int_S s.u dA.
// Throws DeterminantViolation if det grad u <= 0 at a quadrature point.
double total_energy(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u);
// Weak-form residual restricted to the free dofs.
Eigen::VectorXd residual(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u);
// Same residual on every dof (constrained rows included).
Eigen::VectorXd full_residual(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u);
// z^T M z = int grad z : A(grad u)[grad z] on free dofs.
SpMat second_variation_matrix(const Material& m, const Mesh& mesh, const FeField& u);
// z^T G z = int |grad z|^2 on free dofs.
SpMat gradient_gram(const Mesh& mesh);
// Assembles int grad z : op(e, q)[grad z'] on free dofs. op must be
// symmetric in the Frobenius pairing.
SpMat assemble_form(const Mesh& mesh, const std::function<Mat(std::size_t e, int q, const Mat& h)>& op);

// Checks det grad u > 0 at every quadrature point; returns the minimum.
double min_jacobian(const Mesh& mesh, const FeField& u);
// Smallest det grad u over element corners (no check). A Q1 field can be
// positive at every Gauss point and still fold at a corner.
double min_corner_jacobian(const Mesh& mesh, const FeField& u);

// int grad w dx.
Mat integrated_gradient(const Mesh& mesh, const FeField& w);
// (int |grad w|^p)^(1/p) by quadrature; p = 2 gives the norm of G.
double gradient_norm(const Mesh& mesh, const FeField& w, double p = 2);
double gradient_sup(const Mesh& mesh, const FeField& w);

struct IdentityCheck {
  double lhs = 0;            // E(v) - E(u_e)
  double rhs = 0;            // int W(grad v) - W(grad u_e) - S(grad u_e) : grad w
  double discrepancy = 0;    // |lhs - rhs|
  double residual_inf = 0;   // |residual(u_e)|_inf
  double grad_w_l1 = 0;      // int |grad w|
  double mean_gradient = 0;  // |int grad w|, zero when w vanishes on the whole boundary
};
// Throws NotEquilibrium if |residual(u_e)|_inf > tol and BoundaryMismatch if
// v differs from u_e on D.
IdentityCheck energy_identity_check(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u_e,
                                    const FeField& v, double tol);

// Quadrature-subcell view of per-point matrices: every element of a lattice
// mesh is split into 2^n subcells of side h/2, one per Gauss point, so cell
// averages of the grid equal quadrature averages on the mesh. Throws
// ConfigError if the mesh has no lattice.
GridField quadrature_grid(const Mesh& mesh, int matrix_dim, const std::function<Mat(std::size_t e, int q)>& value);
GridField gradient_grid(const Mesh& mesh, const FeField& u);

}  // namespace rigcert

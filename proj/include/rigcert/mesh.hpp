#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rigcert/tensor_core.hpp"

namespace rigcert {

// Shape-function gradients of one element at one point: column a holds
// grad N_a.
using ShapeGrad = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 8>;
using ShapeVal = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;

struct QuadPoint {
  Vec xi;          // reference coordinates in [-1, 1]^n
  Vec x;           // physical position
  double weight;   // Gauss weight times det J
  ShapeVal n;      // shape values
  ShapeGrad dn;    // physical shape gradients
};

// Boundary facet: an edge (2 nodes) in 2D or a quadrilateral face (4 nodes)
// in 3D, owned by exactly one element.
struct Facet {
  std::array<int, 4> nodes{-1, -1, -1, -1};
  long element = -1;
  int local = -1;  // local face index within the element
};

struct FacetPoint {
  Vec xi;          // reference coordinates inside the owning element
  Vec x;
  Vec normal;      // outward unit normal
  double weight;   // Gauss weight times area element
  ShapeVal n;
  ShapeGrad dn;    // element shape gradients at the point
};

// Integer cell coordinates of every element on a uniform axis-aligned
// lattice. Present for generated meshes and for file meshes made of equal
// axis-aligned squares or cubes.
struct Lattice {
  double spacing = 1;
  std::array<double, 3> origin{0, 0, 0};
  std::array<int, 3> extent{0, 0, 1};
  std::vector<std::array<int, 3>> cell;
};

class Mesh {
 public:
  // Builds a Q1 mesh: quads (4 nodes, counterclockwise) or hexes (8 nodes,
  // bottom face counterclockwise then top face). Boundary facets are found
  // from connectivity; those selected by is_dirichlet form D, the rest S.
  static Mesh build(int dim, std::vector<Vec> nodes, std::vector<std::array<int, 8>> elements,
                    const std::function<bool(const Facet&, const Mesh&)>& is_dirichlet);

  int dim() const { return dim_; }
  int nodes_per_element() const { return dim_ == 2 ? 4 : 8; }
  int nodes_per_facet() const { return dim_ == 2 ? 2 : 4; }
  int qp_per_element() const { return dim_ == 2 ? 4 : 8; }
  int qp_per_facet() const { return dim_ == 2 ? 2 : 4; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  std::size_t dof_count() const { return nodes_.size() * static_cast<std::size_t>(dim_); }

  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 8>>& elements() const { return elements_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<int>& dirichlet_facets() const { return dirichlet_; }
  const std::vector<int>& traction_facets() const { return traction_; }
  // Sorted node indices touching a Dirichlet facet.
  const std::vector<int>& dirichlet_nodes() const { return dirichlet_nodes_; }
  bool is_dirichlet_node(int node) const { return dirichlet_mask_[node] != 0; }

  const QuadPoint& qp(std::size_t element, int q) const { return qps_[element * qp_per_element() + q]; }
  // Quadrature on traction facet t (index into traction_facets()).
  const FacetPoint& traction_qp(std::size_t t, int q) const { return fqps_[t * qp_per_facet() + q]; }

  const std::optional<Lattice>& lattice() const { return lattice_; }
  void set_lattice(Lattice lattice) { lattice_ = std::move(lattice); }

  double volume() const;
  // Same connectivity, facets and lattice with moved nodes; quadrature is
  // recomputed. Throws DeterminantViolation if an element inverts.
  Mesh with_nodes(std::vector<Vec> nodes) const;
  // Same geometry with a new Dirichlet/traction split.
  Mesh with_dirichlet(const std::function<bool(const Facet&, const Mesh&)>& is_dirichlet) const;

  Vec facet_midpoint(const Facet& f) const;
  // Element-local shape data at arbitrary reference coordinates.
  void shape(const Vec& xi, ShapeVal& n, ShapeGrad& dn_ref) const;
  // Physical gradient data; returns det J.
  double map(std::size_t element, const Vec& xi, Vec& x, ShapeVal& n, ShapeGrad& dn) const;

 private:
  void finalize(const std::function<bool(const Facet&, const Mesh&)>& is_dirichlet);
  void compute_quadrature();

  int dim_ = 2;
  std::vector<Vec> nodes_;
  std::vector<std::array<int, 8>> elements_;
  std::vector<Facet> facets_;
  std::vector<int> dirichlet_, traction_, dirichlet_nodes_;
  std::vector<unsigned char> dirichlet_mask_;
  std::vector<QuadPoint> qps_;
  std::vector<FacetPoint> fqps_;
  std::optional<Lattice> lattice_;
};

// Reference coordinates of local node a, in {-1, 1}^n.
Vec reference_corner(int dim, int a);

// Facet selection by side names: left, right, bottom, top, front, back
// (faces of the bounding box), outer (any bounding-box face), inner (the
// rest), all, none. A comma-separated list selects the union.
std::function<bool(const Facet&, const Mesh&)> select_sides(const std::string& sides);

Mesh rectangle_mesh(int nx, int ny, double lx, double ly, const std::string& dirichlet_sides);
Mesh box_mesh(int nx, int ny, int nz, double lx, double ly, double lz, const std::string& dirichlet_sides);
// [0, l]^2 with the upper-right quadrant removed; n even.
Mesh l_shape_mesh(int n, double l, const std::string& dirichlet_sides);
// [0, l]^2 with the central square [l/4, 3l/4]^2 removed; n divisible by 4.
Mesh square_annulus_mesh(int n, double l, const std::string& dirichlet_sides);

// Text format:
//   nodes N / N coordinate lines / elements M / M index tuples /
//   dirichlet K / K facet tuples / traction L / L facet tuples
Mesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);

// FNV-1a hash of coordinates, connectivity and the boundary split.
std::string mesh_hash(const Mesh& mesh);

}  // namespace rigcert

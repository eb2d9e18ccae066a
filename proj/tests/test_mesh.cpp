#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rigcert/error.hpp"
#include "rigcert/mesh.hpp"

using namespace rigcert;

namespace {

// Boundary integrals of n and x (x) n over all facets; the divergence theorem
// makes them 0 and |Omega| I.
void check_closed_boundary(const Mesh& all_traction, double volume) {
  const int n = all_traction.dim();
  Vec sn = Vec::Zero(n);
  Mat sxn = Mat::Zero(n, n);
  for (std::size_t t = 0; t < all_traction.traction_facets().size(); ++t)
    for (int q = 0; q < all_traction.qp_per_facet(); ++q) {
      const FacetPoint& p = all_traction.traction_qp(t, q);
      sn += p.weight * p.normal;
      sxn += p.weight * p.x * p.normal.transpose();
      CHECK(p.normal.norm() == doctest::Approx(1).epsilon(1e-14));
    }
  CHECK(sn.norm() < 1e-13);
  CHECK((sxn - volume * Mat::Identity(n, n)).norm() < 1e-13);
}

}  // namespace

TEST_CASE("rectangle mesh counts and boundary split") {
  const Mesh m = rectangle_mesh(4, 3, 2.0, 1.5, "left,bottom");
  CHECK(m.node_count() == 20);
  CHECK(m.element_count() == 12);
  CHECK(m.facets().size() == 14);
  CHECK(m.dirichlet_facets().size() == 7);
  CHECK(m.traction_facets().size() == 7);
  CHECK(m.dirichlet_nodes().size() == 8);
  CHECK(m.volume() == doctest::Approx(3.0).epsilon(1e-14));
  REQUIRE(m.lattice());
  CHECK(m.lattice()->spacing == doctest::Approx(0.5));
  check_closed_boundary(rectangle_mesh(4, 3, 2.0, 1.5, "none"), 3.0);
}

TEST_CASE("non-square cells carry no lattice") {
  CHECK_FALSE(rectangle_mesh(4, 4, 2.0, 1.0, "all").lattice());
}

TEST_CASE("L-shape and annulus geometry") {
  const Mesh l = l_shape_mesh(8, 1.0, "outer");
  CHECK(l.element_count() == 48);
  CHECK(l.volume() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(l.facets().size() == 32);
  CHECK(l.dirichlet_facets().size() == 24);  // reentrant edges are not on the bounding box
  const Mesh a = square_annulus_mesh(8, 1.0, "inner");
  CHECK(a.volume() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(a.facets().size() == 32 + 16);
  CHECK(a.dirichlet_facets().size() == 16);
  check_closed_boundary(square_annulus_mesh(8, 1.0, "none"), 0.75);
}

TEST_CASE("box mesh") {
  const Mesh b = box_mesh(2, 3, 2, 1.0, 1.5, 1.0, "front");
  CHECK(b.node_count() == 3 * 4 * 3);
  CHECK(b.element_count() == 12);
  CHECK(b.facets().size() == 2 * (6 + 4 + 6));
  CHECK(b.dirichlet_facets().size() == 6);
  CHECK(b.volume() == doctest::Approx(1.5).epsilon(1e-14));
  check_closed_boundary(box_mesh(2, 3, 2, 1.0, 1.5, 1.0, "none"), 1.5);
}

TEST_CASE("shape functions partition unity and reproduce linear maps") {
  const Mesh m = box_mesh(1, 1, 1, 2.0, 3.0, 4.0, "none");
  Vec xi(3);
  xi << 0.3, -0.7, 0.1;
  Vec x;
  ShapeVal n;
  ShapeGrad dn;
  const double det = m.map(0, xi, x, n, dn);
  CHECK(det == doctest::Approx(3.0));
  CHECK(n.sum() == doctest::Approx(1.0));
  Mat g = Mat::Zero(3, 3);
  for (int a = 0; a < 8; ++a) g += m.nodes()[m.elements()[0][a]] * dn.col(a).transpose();
  CHECK((g - Mat::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("inverted element is rejected") {
  const Mesh m = rectangle_mesh(1, 1, 1, 1, "all");
  auto nodes = m.nodes();
  std::swap(nodes[1], nodes[3]);
  CHECK_THROWS_AS(m.with_nodes(nodes), Error);
}

TEST_CASE("mesh file round trip") {
  const Mesh m = l_shape_mesh(4, 2.0, "left,bottom");
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  CHECK(mesh_hash(r) == mesh_hash(m));
  CHECK(r.dirichlet_facets().size() == m.dirichlet_facets().size());
  REQUIRE(r.lattice());
  CHECK(r.lattice()->cell == m.lattice()->cell);
  CHECK(r.lattice()->spacing == m.lattice()->spacing);

  std::stringstream bad("nodes 1\n0 0\nelements 0\n");
  CHECK_THROWS_AS(read_mesh(bad), Error);
}

TEST_CASE("mesh hash depends on the boundary split") {
  CHECK(mesh_hash(rectangle_mesh(2, 2, 1, 1, "all")) != mesh_hash(rectangle_mesh(2, 2, 1, 1, "left")));
  CHECK(mesh_hash(rectangle_mesh(2, 2, 1, 1, "all")) == mesh_hash(rectangle_mesh(2, 2, 1, 1, "all")));
}

TEST_CASE("unknown side names are rejected") { CHECK_THROWS_AS(select_sides("left,up"), Error); }

#pragma once

#include <functional>
#include <optional>

#include "rigcert/error.hpp"
#include "rigcert/fem.hpp"
#include "rigcert/material.hpp"
#include "rigcert/random.hpp"
#include "rigcert/solver.hpp"

namespace rigcert::testing {

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

// Unit square clamped on the whole boundary at d = 1.05 x, with a small
// downward body force so that the equilibrium is not affine.
struct Stretch {
  Mesh mesh;
  StVenantKirchhoff material{1, 1};
  LoadSet loads;
  FeField u0;
  FeField u_e;

  explicit Stretch(int cells, double body = -0.1)
      : mesh(rectangle_mesh(cells, cells, 1, 1, "all")) {
    loads = make_loads(
        mesh, [body](const Vec&) { return vec2(0, body); }, nullptr, [](const Vec& x) { return Vec(1.05 * x); });
    u0 = interpolate(mesh, [](const Vec& x) { return Vec(1.05 * x); });
    u_e = solve_equilibrium(material, mesh, loads, u0, {.tol = 1e-12}).u;
  }
};

// Smooth field vanishing on the boundary of the unit square.
inline FeField bump(const Mesh& mesh, double amp, int kx, int ky, double phase = 0) {
  return interpolate(mesh, [=](const Vec& x) {
    const double s = std::sin(kx * M_PI * x(0)) * std::sin(ky * M_PI * x(1));
    return vec2(amp * s * std::cos(phase), amp * s * std::sin(phase + 0.3));
  });
}

// Random nodal perturbation vanishing on D.
inline FeField random_interior(const Mesh& mesh, double amp, Rng& rng) {
  FeField w{mesh.dim(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count()))};
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (!mesh.is_dirichlet_node(static_cast<int>(i)))
      for (int d = 0; d < mesh.dim(); ++d) w.values(i * mesh.dim() + d) = amp * uniform(rng, -1, 1);
  return w;
}

inline FeField add(const FeField& a, const FeField& b, double s = 1) { return FeField{a.dim, a.values + s * b.values}; }

// Code of the Error thrown by f, if any.
inline std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace rigcert::testing

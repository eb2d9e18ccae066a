#pragma once

#include <functional>

#include "rigcert/eigen.hpp"
#include "rigcert/fem.hpp"
#include "rigcert/harmonic.hpp"

namespace rigcert {

// Rotation factor of the polar decomposition of the mean gradient; the L2
// closest single rotation. Throws DegenerateMean if det of the mean <= 0.
Mat best_rotation(const GridField& grad);
Mat best_rotation(const Mesh& mesh, const FeField& u);

// Rotation minimizing the average of |grad v - R|^p, started from the L2
// rotation. Diagnostic for p != 2.
Mat best_rotation_p(const GridField& grad, double p);

struct RigidityReport {
  Mat r_best;
  double p = 2;
  double lhs_p = 0;         // average |grad v - R|^p
  double rhs_p = 0;         // average dist(grad v, SO(n))^p
  double c_emp = 0;         // (lhs/rhs)^(1/p); 0 when both vanish
  bool c_infinite = false;  // rhs = 0 < lhs: pointwise rotations that are not one rotation
  double lhs_p_optimal = 0; // lhs with the p-optimal rotation
  double bmo_seminorm = 0;
  double dist_sup = 0;
  double m_emp = 0;         // bmo_seminorm / dist_sup; 0 when both vanish
  bool m_infinite = false;
};

// Throws DegenerateMean, DetNonPositive (cellwise), BadExponents for p <= 1.
RigidityReport rigidity_fit(const GridField& grad, double p);

struct BoundaryClosenessReport {
  Mat r1, r2;
  double rotation_gap = 0;  // |R1 - R2|
  double rotation_rhs = 0;  // sum_i |grad u_i - R_i|_p
  double a_rotation = 0;    // gap / rhs
  double gradient_l1 = 0;   // |grad u1 - grad u2|_1
  double dist_rhs = 0;      // sum_i |dist(grad u_i, SO(n))|_p
  double a_l1 = 0;          // gradient_l1 / dist_rhs
};

// Norms are unnormalized integrals over the mesh. Requires p > n
// (ConfigError otherwise) and u1 = u2 on D (BoundaryMismatch).
BoundaryClosenessReport boundary_rotation_closeness(const Mesh& mesh, const FeField& u1, const FeField& u2, double p);

struct KornReport {
  double k = 0;                 // smallest eigenvalue of the Korn pencil
  double certified_lower = 0;
  double min_det = 0;
  double residual = 0;
  int iterations = 0;
};

// K = inf over FE fields w vanishing on D of
//   int |F^T grad w + grad w^T F|^2 / int |grad w|^2.
// F is sampled at the quadrature points. Throws DetBelowFloor if
// min det F < 1e-8 and EigenFailure.
KornReport korn_constant(const Mesh& mesh, const std::function<Mat(const Vec& x)>& f);

}  // namespace rigcert

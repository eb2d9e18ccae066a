#include "rigcert/solver.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "rigcert/error.hpp"

namespace rigcert {

namespace {

// Newton direction from K p = -r. An indefinite or singular tangent is
// shifted by tau I until the factorization is positive definite, so the
// direction is always a descent direction for the energy.
Eigen::VectorXd newton_direction(const SpMat& k, const Eigen::VectorXd& r, double& shift) {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  double scale = 0;
  for (Eigen::Index i = 0; i < k.rows(); ++i) scale = std::max(scale, std::abs(k.coeff(i, i)));
  if (scale == 0) scale = 1;
  SpMat id(k.rows(), k.cols());
  id.setIdentity();
  shift = 0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const SpMat a = shift == 0 ? k : SpMat(k + shift * id);
    ldlt.compute(a);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0).all()) {
      Eigen::VectorXd p = ldlt.solve(-r);
      if (p.allFinite()) return p;
    }
    shift = shift == 0 ? 1e-8 * scale : 10 * shift;
  }
  fail(ErrorCode::SingularTangent, "tangent matrix could not be regularized");
}

}  // namespace

SolveResult solve_equilibrium(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u0,
                              const SolveOptions& opt) {
  if (dirichlet_mismatch(mesh, loads, u0) > 1e-12) fail(ErrorCode::BoundaryMismatch, "initial guess violates the Dirichlet data");
  if (opt.corner_det_check && !(min_corner_jacobian(mesh, u0) > 0))
    fail(ErrorCode::DeterminantViolation, "initial guess has det grad u <= 0 at an element corner");
  const DofMap dofs(mesh);
  SolveResult out;
  out.u = u0;
  double energy = total_energy(m, mesh, loads, out.u);
  Eigen::VectorXd r = residual(m, mesh, loads, out.u);
  double rinf = r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
  out.log.push_back({0, energy, rinf, 0, 0, 0});
  int it = 0;
  while (rinf > opt.tol) {
    if (it >= opt.max_iterations)
      fail(ErrorCode::MaxIterations, "Newton did not converge in " + std::to_string(opt.max_iterations) +
                                         " iterations, residual " + std::to_string(rinf));
    ++it;
    double shift = 0;
    const Eigen::VectorXd p = newton_direction(second_variation_matrix(m, mesh, out.u), r, shift);
    const Eigen::VectorXd step = dofs.extend(p);
    const double slope = r.dot(p);  // < 0 for a descent direction
    double t = 1;
    int halvings = 0;
    for (;;) {
      if (t < opt.min_step) fail(ErrorCode::LineSearchStall, "line search step fell below " + std::to_string(opt.min_step));
      FeField trial{out.u.dim, out.u.values + t * step};
      bool ok = false;
      double e_trial = 0;
      Eigen::VectorXd r_trial;
      try {
        if (opt.corner_det_check && !(min_corner_jacobian(mesh, trial) > 0))
          fail(ErrorCode::DeterminantViolation, "det grad u <= 0 at an element corner");
        e_trial = total_energy(m, mesh, loads, trial);
        const double roundoff = 1e-13 * (1 + std::abs(energy));
        if (e_trial <= energy + opt.armijo * t * slope) {
          ok = true;
        } else if (e_trial - energy <= roundoff) {
          // Near convergence the energy change drowns in roundoff; accept on
          // a residual decrease instead.
          r_trial = residual(m, mesh, loads, trial);
          ok = r_trial.lpNorm<Eigen::Infinity>() < rinf;
        }
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DeterminantViolation && err.code() != ErrorCode::OutsideDomain) throw;
      }
      if (ok) {
        out.u = std::move(trial);
        energy = e_trial;
        r = r_trial.size() == r.size() && r_trial.size() ? r_trial : residual(m, mesh, loads, out.u);
        rinf = r.size() ? r.lpNorm<Eigen::Infinity>() : 0.0;
        out.log.push_back({it, energy, rinf, t, halvings, shift});
        break;
      }
      t *= 0.5;
      ++halvings;
    }
  }
  out.iterations = it;
  out.residual_inf = rinf;
  out.energy = energy;
  return out;
}

}  // namespace rigcert

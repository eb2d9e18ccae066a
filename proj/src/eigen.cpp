#include "rigcert/eigen.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "rigcert/error.hpp"
#include "rigcert/random.hpp"

namespace rigcert {

long negative_inertia(const SpMat& a, const SpMat& b, double sigma) {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  ldlt.compute(sigma == 0 ? a : SpMat(a - sigma * b));
  if (ldlt.info() != Eigen::Success) return -1;
  long neg = 0;
  for (Eigen::Index i = 0; i < ldlt.vectorD().size(); ++i) {
    const double d = ldlt.vectorD()(i);
    if (!std::isfinite(d) || d == 0) return -1;
    if (d < 0) ++neg;
  }
  return neg;
}

namespace {

struct LanczosResult {
  double theta = 0;
  Eigen::VectorXd x;
  int steps = 0;
};

// Largest eigenpair of T = (M - sigma G)^-1 G, self-adjoint in the G inner
// product.
LanczosResult lanczos(const SpMat& m, const SpMat& g, double sigma, const EigenOptions& opt) {
  Eigen::SimplicialLDLT<SpMat> solver;
  solver.compute(SpMat(m - sigma * g));
  if (solver.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "shifted factorization failed");
  const Eigen::Index n = m.rows();
  const int kmax = static_cast<int>(std::min<Eigen::Index>(n, opt.max_lanczos));
  Eigen::MatrixXd q(n, kmax);
  std::vector<double> alpha, beta;
  Rng rng(opt.seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  v /= std::sqrt(v.dot(g * v));
  LanczosResult out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  for (int j = 0; j < kmax; ++j) {
    q.col(j) = v;
    Eigen::VectorXd w = solver.solve(g * v);
    const double a = (g * v).dot(w);
    w -= a * v;
    if (j > 0) w -= beta.back() * q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd gw = g * w;
      const Eigen::VectorXd c = q.leftCols(j + 1).transpose() * gw;
      w -= q.leftCols(j + 1) * c;
    }
    alpha.push_back(a);
    const double b = std::sqrt(std::max(0.0, w.dot(g * w)));
    const bool last = j + 1 == kmax;
    const bool exhausted = b <= 1e-14 * std::abs(a);
    if (j % 5 == 4 || last || exhausted) {
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), j + 1);
      Eigen::VectorXd s = j ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), j)) : Eigen::VectorXd();
      tri.computeFromTridiagonal(d, s, Eigen::ComputeEigenvectors);
      if (tri.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "tridiagonal eigensolve failed");
      const double theta = tri.eigenvalues()(j);
      const double est = b * std::abs(tri.eigenvectors()(j, j));
      if (est <= opt.tol * std::abs(theta) || last || exhausted) {
        out.theta = theta;
        out.x = q.leftCols(j + 1) * tri.eigenvectors().col(j);
        out.steps = j + 1;
        return out;
      }
    }
    beta.push_back(b);
    v = w / b;
  }
  fail(ErrorCode::EigenFailure, "Lanczos ended without a Ritz value");
}

}  // namespace

GeneralizedEigen smallest_generalized_eigen(const SpMat& m, const SpMat& g, const EigenOptions& opt) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n || g.rows() != n || g.cols() != n) fail(ErrorCode::EigenFailure, "empty or mismatched matrices");
  if (negative_inertia(g, g, 0) != 0) fail(ErrorCode::EigenFailure, "G is not positive definite");
  double scale = 0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(m.coeff(i, i)) / g.coeff(i, i));
  if (scale == 0) scale = 1;

  // A shift with clean inertia lies below the whole spectrum.
  double sigma = 0;
  if (negative_inertia(m, g, sigma) != 0) {
    sigma = -1e-3 * scale;
    int tries = 0;
    while (negative_inertia(m, g, sigma) != 0) {
      if (++tries > 80) fail(ErrorCode::EigenFailure, "no shift below the spectrum found");
      sigma *= 4;
    }
  }

  GeneralizedEigen out;
  for (int pass = 0; pass < 8; ++pass) {
    const LanczosResult lr = lanczos(m, g, sigma, opt);
    out.iterations += lr.steps;
    if (!(lr.theta > 0)) fail(ErrorCode::EigenFailure, "non-positive Ritz value for the inverted operator");
    const double lambda = sigma + 1 / lr.theta;
    const double eta = 1e-9 * std::max(std::abs(lambda), 1e-6 * scale);
    const double lower = lambda - eta;
    const long neg = negative_inertia(m, g, lower);
    if (neg == 0) {
      // Converged to the bottom of the spectrum; a closer shift sharpens it.
      const double closer = lambda - 0.02 * (lambda - sigma);
      if (pass == 0 && closer > sigma && negative_inertia(m, g, closer) == 0 && lambda - sigma > 1e3 * eta) {
        sigma = closer;
        continue;
      }
      out.value = lambda;
      out.vector = lr.x / std::sqrt(lr.x.dot(g * lr.x));
      const Eigen::VectorXd gz = g * out.vector;
      out.residual = (m * out.vector - lambda * gz).norm() / gz.norm();
      out.shift = sigma;
      out.certified_lower = lower;
      return out;
    }
    // Lanczos missed a lower eigenvalue: bisect on inertia for a shift just
    // below it and restart there.
    double lo = sigma, hi = lower;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (negative_inertia(m, g, mid) == 0 ? lo : hi) = mid;
    }
    sigma = lo - 1e-3 * (hi - sigma);
    if (negative_inertia(m, g, sigma) != 0) sigma = lo;
  }
  fail(ErrorCode::EigenFailure, "smallest eigenvalue could not be certified");
}

double coercivity_constant(const SpMat& m, const SpMat& g) { return smallest_generalized_eigen(m, g).value; }

}  // namespace rigcert

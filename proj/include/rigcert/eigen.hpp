#pragma once

#include <cstdint>

#include "rigcert/fem.hpp"

namespace rigcert {

struct EigenOptions {
  double tol = 1e-12;         // relative Ritz residual
  int max_lanczos = 400;
  std::uint64_t seed = 7;
};

struct GeneralizedEigen {
  double value = 0;           // smallest eigenvalue of M z = lambda G z
  Eigen::VectorXd vector;     // G-normalized
  double residual = 0;        // |M z - lambda G z| / |G z|
  double shift = 0;           // final shift below the spectrum
  double certified_lower = 0; // inertia-certified lower bound
  int iterations = 0;
};

// Shift-invert Lanczos on (M - sigma G)^-1 G with full reorthogonalization in
// the G inner product. sigma is kept below the spectrum by LDLT inertia, and
// the returned value is certified from below the same way. G must be
// positive definite. Throws EigenFailure.
GeneralizedEigen smallest_generalized_eigen(const SpMat& m, const SpMat& g, const EigenOptions& opt = {});

// Discrete coercivity: sup{k : z^T M z >= k z^T G z}.
double coercivity_constant(const SpMat& m, const SpMat& g);

// Number of negative pivots of an LDLT factorization of a - sigma b; -1 if the
// factorization fails.
long negative_inertia(const SpMat& a, const SpMat& b, double sigma);

}  // namespace rigcert

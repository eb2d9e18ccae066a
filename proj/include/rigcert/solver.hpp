#pragma once

#include <vector>

#include "rigcert/fem.hpp"

namespace rigcert {

struct SolveOptions {
  double tol = 1e-10;  // on |residual|_inf
  int max_iterations = 50;
  double armijo = 1e-4;
  double min_step = 1e-12;
  // Also reject line-search trials with det grad u <= 0 at an element corner.
  bool corner_det_check = false;
};

struct NewtonStep {
  int iteration = 0;
  double energy = 0;
  double residual_inf = 0;
  double step = 0;       // accepted line-search step
  int halvings = 0;
  double shift = 0;      // tangent regularization used, 0 if none
};

struct SolveResult {
  FeField u;
  std::vector<NewtonStep> log;  // log[0] is the initial state
  int iterations = 0;
  double residual_inf = 0;
  double energy = 0;
};

// Damped Newton on the weak form. u0 must carry the Dirichlet data and have
// positive Jacobians. Throws LineSearchStall, MaxIterations, SingularTangent.
SolveResult solve_equilibrium(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u0,
                              const SolveOptions& opt = {});

}  // namespace rigcert

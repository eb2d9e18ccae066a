#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rigcert/eigen.hpp"
#include "rigcert/fem.hpp"
#include "rigcert/material.hpp"
#include "rigcert/rigidity.hpp"
#include "rigcert/solver.hpp"

namespace rigcert {

using Json = nlohmann::ordered_json;

struct Problem {
  const Material& material;
  const Mesh& mesh;
  const LoadSet& loads;
};

enum class GateOutcome { Pass, Inapplicable, AssertionViolated };
std::string_view to_string(GateOutcome o);

// Constants feeding the gates. kappa is the smallest eigenvalue of the
// second-variation pencil; the hypothesis "second variation >= 8 k_hat"
// makes k_hat = kappa / 8.
struct CertInputs {
  double kappa = 0;
  double k_hat = 0;
  double c_taylor = 0;
  double c_hat_taylor = 0;
  double j2 = 0;
  int nn = 4;                 // gradient components, n * n
  double ball_radius = 0.2;   // B = {dist(F, SO(n)) < ball_radius}
  double delta_star = 0;      // energy-gap gate radius
  double transfer_radius = 0; // second-variation transfer radius
};

// delta* = k_hat / (2 c J2^3 Nn), capped at `cap` (c = 0 gives the cap).
// Throws NonPositiveK for k_hat <= 0 and ConfigError for J2 <= 0 or Nn < 1.
double neighborhood_radius(double k_hat, double c_taylor, double j2, int nn, double cap = 1e12);
// eps = 2 k_hat / (c_hat J2^3 Nn): absorbs the c_hat cubic term of the
// second-variation transfer into 4 k_hat.
double transfer_radius(double k_hat, double c_hat, double j2, int nn, double cap = 1e12);

// Largest |C - I| over quadrature points, C = grad u^T grad u.
double strain_sup(const Mesh& mesh, const FeField& u);
// Largest dist(grad u, SO(n)); +inf if det grad u <= 0 somewhere.
double rotation_distance_sup(const Mesh& mesh, const FeField& u);

struct GateReport {
  GateOutcome outcome = GateOutcome::Inapplicable;
  bool in_ball = false;
  bool bmo_small = false;
  bool mean_small = false;
  double dist_sup = 0;      // sup dist(grad v, SO(n))
  double bmo = 0;           // BMO seminorm of grad w
  double mean = 0;          // |average of grad w|
  bool mean_by_divergence = false;  // pure displacement: the mean vanishes identically
  double delta_star = 0;
  double grad_w_sq = 0;     // int |grad w|^2
  double gap = 0;           // E(v) - E(u_e)
  double bound = 0;         // k_hat int |grad w|^2
  double slack = 0;
  double ratio = 0;         // gap / bound
  bool gap_ratio_ok = false; // gap >= 0.9 bound, recorded whether or not the gate applies
};

// Requires v = u_e on D (BoundaryMismatch) and a lattice mesh.
GateReport local_min_gate(const Problem& pr, const FeField& u_e, const FeField& v, const CertInputs& ci);

struct TransferReport {
  GateOutcome outcome = GateOutcome::Inapplicable;
  bool in_ball = false;
  bool bmo_small = false;
  bool mean_small = false;
  double bmo = 0;
  double mean = 0;
  double radius = 0;
  double lhs = 0;       // int grad w : A(grad v)[grad w]
  double rhs = 0;       // 4 k_hat int |grad w|^2
  double ratio = 0;     // lhs / int |grad w|^2
  double kappa_v = 0;   // smallest eigenvalue of the pencil at v
};

// Throws HypothesisUnmet if ci.k_hat <= 0 or kappa < 8 k_hat.
TransferReport direction_positivity_transfer(const Problem& pr, const FeField& u, const FeField& v, const CertInputs& ci);

struct MultiStartReport {
  std::size_t restarts = 0;
  double amplitude = 0;
  std::uint64_t seed = 0;
  std::vector<int> iterations;
  std::vector<double> energies;
  double max_pairwise_grad_diff = 0;  // max over pairs of sup |grad u_i - grad u_j|
  double max_residual = 0;
};

// Restarts Newton from `start` plus seeded smooth perturbations vanishing on
// D and compares the converged gradients pairwise; a reference solution, if
// given, joins the comparison.
MultiStartReport multistart(const Problem& pr, const FeField& start, std::size_t restarts, double amplitude,
                            std::uint64_t seed, const SolveOptions& opt = {}, const FeField* reference = nullptr);

// Smooth random displacement fields sum_k a_k sin(pi k.x / L + phi_k),
// scaled so that sup |grad| is about `amplitude`. The values are not
// constrained on D.
std::vector<FeField> random_smooth_family(const Mesh& mesh, std::size_t count, double amplitude, std::uint64_t seed);
// Scalar component fields of grad w on the quadrature grid, zero fields dropped.
std::vector<GridField> component_fields(const Mesh& mesh, const FeField& w);

struct Measurement {
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};

struct CandidateResult {
  std::size_t id = 0;
  GateOutcome outcome = GateOutcome::Inapplicable;
  std::string reason;
  double strain_sup = 0;
  double dist_sup = 0;
  std::optional<GateReport> gate;
  std::optional<TransferReport> transfer;
  std::optional<RigidityReport> rigidity;
  std::optional<BoundaryClosenessReport> closeness;
  Json extra = Json::object();
};

struct Certificate {
  std::string problem_id;
  std::string configuration = "reference";
  CertInputs inputs;
  TaylorConstants taylor;
  GeneralizedEigen coercivity;
  double ue_strain_sup = 0;
  double ue_dist_sup = 0;
  double strain_delta = 0;
  double residual_inf = 0;
  std::map<std::string, Measurement> measurements;
  std::vector<CandidateResult> candidates;
  std::optional<MultiStartReport> multistart;
  Json provenance = Json::object();
  Json extra = Json::object();

  // Worst outcome over measurements and candidates.
  GateOutcome verdict() const;
};

struct CertifyOptions {
  std::string problem_id = "problem";
  double ball_radius = 0.2;      // radius of B
  double taylor_epsilon = 0.05;  // fattening used for the Taylor constants
  double strain_delta = 0.2;     // |C - I|_inf threshold for u_e and candidates
  TaylorOptions taylor;
  std::size_t family_size = 32;
  std::uint64_t family_seed = 1;
  double family_amplitude = 0.01;
  double equilibrium_tol = 1e-10;
  double closeness_p = 0;        // 0 selects n + 1
  double rigidity_p = 2;
  double delta_cap = 1e12;
  std::size_t restarts = 0;
  double restart_amplitude = 0.02;
  std::uint64_t restart_seed = 1;
  std::size_t constitutive_samples = 200;
  std::uint64_t constitutive_seed = 1;
};

// Builds the gate constants at u_e: coercivity pencil, Taylor constants on B,
// and J2 fitted on the seeded family plus the component fields of `extra`.
CertInputs prepare_inputs(const Problem& pr, const FeField& u_e, const std::vector<FeField>& extra,
                          const CertifyOptions& opt, TaylorConstants* taylor_out = nullptr,
                          GeneralizedEigen* eigen_out = nullptr, Json* manifest_out = nullptr);

// u_e + a * phi f_k for every amplitude a and k < modes, amplitude-major:
// f_k are seeded smooth fields, phi the Dirichlet cutoff, and each product is
// scaled to sup |grad| = a. Every candidate matches u_e on D.
std::vector<FeField> perturbed_candidates(const Mesh& mesh, const FeField& u_e, const std::vector<double>& amplitudes,
                                          std::size_t modes, std::uint64_t seed);

// Local-minimality certificate from coercivity of the second variation and
// the BMO gate alone (no strain bound). Throws HypothesisUnmet naming the failed prerequisite.
Certificate bmo_gate_certificate(const Problem& pr, const FeField& u_e, const std::vector<FeField>& candidates,
                                 const CertifyOptions& opt);

// Small-strain uniqueness certificate for the pure-displacement or mixed
// problem. Throws HypothesisUnmet naming the failed prerequisite.
Certificate small_strain_uniqueness(const Problem& pr, const FeField& u_e, const std::vector<FeField>& candidates,
                                    const CertifyOptions& opt);

// Non-finite numbers become the strings "inf", "-inf", "nan".
Json json_number(double v);
Json to_json(const Mat& m);
Json to_json(const GateReport& g);
Json to_json(const TransferReport& t);
Json to_json(const RigidityReport& r);
Json to_json(const BoundaryClosenessReport& b);
Json to_json(const MultiStartReport& m);
Json to_json(const Certificate& c);

}  // namespace rigcert

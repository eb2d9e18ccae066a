#include "rigcert/certify.hpp"

#include <algorithm>
#include <cmath>

#include "rigcert/error.hpp"
#include "rigcert/parallel.hpp"
#include "rigcert/random.hpp"

namespace rigcert {

std::string_view to_string(GateOutcome o) {
  switch (o) {
    case GateOutcome::Pass: return "pass";
    case GateOutcome::Inapplicable: return "inapplicable";
    case GateOutcome::AssertionViolated: return "assertion_violated";
  }
  return "unknown";
}

double neighborhood_radius(double k_hat, double c_taylor, double j2, int nn, double cap) {
  if (!(k_hat > 0)) fail(ErrorCode::NonPositiveK, "k_hat must be positive for a neighborhood radius");
  if (!(j2 > 0) || nn < 1 || c_taylor < 0) fail(ErrorCode::ConfigError, "neighborhood radius needs J2 > 0, Nn >= 1, c >= 0");
  if (c_taylor == 0) return cap;
  return std::min(cap, k_hat / (2 * c_taylor * j2 * j2 * j2 * nn));
}

double transfer_radius(double k_hat, double c_hat, double j2, int nn, double cap) {
  if (!(k_hat > 0)) fail(ErrorCode::NonPositiveK, "k_hat must be positive for a transfer radius");
  if (!(j2 > 0) || nn < 1 || c_hat < 0) fail(ErrorCode::ConfigError, "transfer radius needs J2 > 0, Nn >= 1, c_hat >= 0");
  if (c_hat == 0) return cap;
  return std::min(cap, 2 * k_hat / (c_hat * j2 * j2 * j2 * nn));
}

double strain_sup(const Mesh& mesh, const FeField& u) {
  double s = 0;
  const Mat id = identity(mesh.dim());
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const Mat f = gradient(mesh, u, e, q);
      s = std::max(s, fnorm(f.transpose() * f - id));
    }
  return s;
}

double rotation_distance_sup(const Mesh& mesh, const FeField& u) {
  double s = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const Mat f = gradient(mesh, u, e, q);
      if (!(f.determinant() > 0)) return INFINITY;
      s = std::max(s, dist_to_rotations(f));
    }
  return s;
}

namespace {

bool pure_displacement(const Mesh& mesh) { return mesh.traction_facets().empty(); }

void require_dirichlet_match(const Mesh& mesh, const FeField& a, const FeField& b) {
  for (int node : mesh.dirichlet_nodes())
    if ((a.at(node) - b.at(node)).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::BoundaryMismatch, "candidate differs from u_e on D at node " + std::to_string(node));
}

// BMO seminorm and mean of grad w on the quadrature grid.
std::pair<double, double> bmo_and_mean(const Mesh& mesh, const FeField& w) {
  const GridField g = gradient_grid(mesh, w);
  return {bmo_seminorm(g, cube_family(g)), fnorm(domain_mean(g))};
}

// Cutoff vanishing on the Dirichlet nodes and rising linearly to 1 at a
// quarter of the mesh diameter.
std::vector<double> dirichlet_cutoff(const Mesh& mesh) {
  Vec lo = mesh.nodes().front(), hi = lo;
  for (const Vec& x : mesh.nodes()) lo = lo.cwiseMin(x), hi = hi.cwiseMax(x);
  const double width = 0.25 * (hi - lo).norm();
  std::vector<double> phi(mesh.node_count(), 1.0);
  if (mesh.dirichlet_nodes().empty()) return phi;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    double d = INFINITY;
    for (int j : mesh.dirichlet_nodes()) d = std::min(d, (mesh.nodes()[i] - mesh.nodes()[j]).norm());
    phi[i] = std::min(1.0, d / width);
  }
  return phi;
}

std::string gate_reason(const GateReport& g) {
  return !g.in_ball ? "grad v leaves B" : !g.bmo_small ? "BMO distance exceeds delta*" : "mean gradient distance exceeds delta*";
}

}  // namespace

GateReport local_min_gate(const Problem& pr, const FeField& u_e, const FeField& v, const CertInputs& ci) {
  const Mesh& mesh = pr.mesh;
  require_dirichlet_match(mesh, u_e, v);
  GateReport g;
  g.delta_star = ci.delta_star;
  g.dist_sup = rotation_distance_sup(mesh, v);
  g.in_ball = g.dist_sup < ci.ball_radius;
  const FeField w{v.dim, v.values - u_e.values};
  std::tie(g.bmo, g.mean) = bmo_and_mean(mesh, w);
  g.mean_by_divergence = pure_displacement(mesh);
  g.bmo_small = g.bmo < ci.delta_star;
  g.mean_small = g.mean < ci.delta_star;
  g.grad_w_sq = std::pow(gradient_norm(mesh, w, 2), 2);
  g.bound = ci.k_hat * g.grad_w_sq;
  if (std::isfinite(g.dist_sup)) {
    const double e_ue = total_energy(pr.material, mesh, pr.loads, u_e);
    g.gap = total_energy(pr.material, mesh, pr.loads, v) - e_ue;
    // Both energies are exact quadrature sums; only summation roundoff remains.
    g.slack = 64 * 2.220446049250313e-16 * (1 + std::abs(e_ue)) * std::sqrt(static_cast<double>(mesh.element_count()));
    g.ratio = g.bound > 0 ? g.gap / g.bound : 0;
    g.gap_ratio_ok = g.gap >= 0.9 * g.bound - g.slack;
  } else {
    g.gap = NAN;
  }
  if (!(g.in_ball && g.bmo_small && g.mean_small)) {
    g.outcome = GateOutcome::Inapplicable;
    return g;
  }
  g.outcome = g.gap >= g.bound - g.slack ? GateOutcome::Pass : GateOutcome::AssertionViolated;
  return g;
}

TransferReport direction_positivity_transfer(const Problem& pr, const FeField& u, const FeField& v, const CertInputs& ci) {
  if (!(ci.k_hat > 0) || ci.kappa < 8 * ci.k_hat * (1 - 1e-12))
    fail(ErrorCode::HypothesisUnmet, "second variation at u is not bounded below by 8 k_hat");
  const Mesh& mesh = pr.mesh;
  require_dirichlet_match(mesh, u, v);
  TransferReport t;
  t.radius = ci.transfer_radius;
  t.in_ball = rotation_distance_sup(mesh, v) < ci.ball_radius;
  const FeField w{v.dim, v.values - u.values};
  std::tie(t.bmo, t.mean) = bmo_and_mean(mesh, w);
  t.bmo_small = t.bmo < t.radius;
  t.mean_small = t.mean < t.radius;
  if (!(t.in_ball && t.bmo_small && t.mean_small)) {
    t.outcome = GateOutcome::Inapplicable;
    return t;
  }
  double lhs = 0, g2 = 0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < mesh.qp_per_element(); ++q) {
      const QuadPoint& p = mesh.qp(e, q);
      const Mat gw = gradient(mesh, w, e, q);
      lhs += p.weight * ddot(gw, pr.material.elasticity_apply({p.x, static_cast<long>(e), q}, gradient(mesh, v, e, q), gw));
      g2 += p.weight * ddot(gw, gw);
    }
  t.lhs = lhs;
  t.rhs = 4 * ci.k_hat * g2;
  t.ratio = g2 > 0 ? lhs / g2 : 0;
  t.kappa_v = coercivity_constant(second_variation_matrix(pr.material, mesh, v), gradient_gram(mesh));
  const double slack = 1e-12 * (std::abs(lhs) + t.rhs);
  t.outcome = lhs >= t.rhs - slack ? GateOutcome::Pass : GateOutcome::AssertionViolated;
  return t;
}

std::vector<FeField> random_smooth_family(const Mesh& mesh, std::size_t count, double amplitude, std::uint64_t seed) {
  const int n = mesh.dim();
  Vec lo = mesh.nodes().front(), hi = lo;
  for (const Vec& x : mesh.nodes()) lo = lo.cwiseMin(x), hi = hi.cwiseMax(x);
  const double len = (hi - lo).maxCoeff();
  Rng rng(seed);
  std::vector<FeField> out;
  for (std::size_t k = 0; k < count; ++k) {
    struct Mode {
      Vec wave, amp;
      double phase;
    };
    std::vector<Mode> modes(3);
    double grad_scale = 0;
    for (Mode& m : modes) {
      m.wave = Vec(n);
      for (int d = 0; d < n; ++d) m.wave(d) = std::round(uniform(rng, -3, 3)) * M_PI / len;
      m.amp = Vec(n);
      for (int d = 0; d < n; ++d) m.amp(d) = normal(rng);
      m.phase = uniform(rng, 0, 2 * M_PI);
      grad_scale += m.amp.norm() * m.wave.norm();
    }
    const double s = grad_scale > 0 ? amplitude / grad_scale : amplitude;
    out.push_back(interpolate(mesh, [&](const Vec& x) {
      Vec v = Vec::Zero(n);
      for (const Mode& m : modes) v += s * m.amp * std::sin(m.wave.dot(x - lo) + m.phase);
      return v;
    }));
  }
  return out;
}

std::vector<GridField> component_fields(const Mesh& mesh, const FeField& w) {
  const int n = mesh.dim();
  std::vector<GridField> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      GridField g = quadrature_grid(mesh, 0, [&](std::size_t e, int q) {
        Mat m(1, 1);
        m(0, 0) = gradient(mesh, w, e, q)(i, j);
        return m;
      });
      bool nonzero = false;
      for (std::size_t c = 0; c < g.box_cells(); ++c)
        if (g.inside(c) && g.at(c) != 0) nonzero = true;
      if (nonzero) out.push_back(std::move(g));
    }
  return out;
}

MultiStartReport multistart(const Problem& pr, const FeField& start, std::size_t restarts, double amplitude,
                            std::uint64_t seed, const SolveOptions& opt, const FeField* reference) {
  const Mesh& mesh = pr.mesh;
  MultiStartReport r;
  r.restarts = restarts;
  r.amplitude = amplitude;
  r.seed = seed;
  const std::vector<double> phi = dirichlet_cutoff(mesh);
  const auto family = random_smooth_family(mesh, restarts, amplitude, seed);
  std::vector<FeField> sols;
  if (reference) sols.push_back(*reference);
  for (std::size_t k = 0; k < restarts; ++k) {
    FeField u0 = start;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) u0.set(i, u0.at(i) + phi[i] * family[k].at(i));
    const SolveResult s = solve_equilibrium(pr.material, mesh, pr.loads, u0, opt);
    r.iterations.push_back(s.iterations);
    r.energies.push_back(s.energy);
    r.max_residual = std::max(r.max_residual, s.residual_inf);
    sols.push_back(s.u);
  }
  for (std::size_t a = 0; a < sols.size(); ++a)
    for (std::size_t b = a + 1; b < sols.size(); ++b)
      r.max_pairwise_grad_diff = std::max(r.max_pairwise_grad_diff, gradient_sup(mesh, FeField{sols[a].dim, sols[a].values - sols[b].values}));
  return r;
}

CertInputs prepare_inputs(const Problem& pr, const FeField& u_e, const std::vector<FeField>& extra, const CertifyOptions& opt,
                          TaylorConstants* taylor_out, GeneralizedEigen* eigen_out, Json* manifest_out) {
  const Mesh& mesh = pr.mesh;
  const int n = mesh.dim();
  CertInputs ci;
  ci.nn = n * n;
  ci.ball_radius = opt.ball_radius;

  const GeneralizedEigen ge = smallest_generalized_eigen(second_variation_matrix(pr.material, mesh, u_e), gradient_gram(mesh));
  ci.kappa = ge.value;
  ci.k_hat = ge.value / 8;

  TaylorOptions to = opt.taylor;
  if (to.points.empty()) {
    // a spread of quadrature points so that modulated materials are sampled
    const std::size_t stride = std::max<std::size_t>(1, mesh.element_count() / 8);
    for (std::size_t e = 0; e < mesh.element_count(); e += stride) to.points.push_back({mesh.qp(e, 0).x, static_cast<long>(e), 0});
  }
  const TaylorConstants tc = taylor_constants(pr.material, n, opt.ball_radius, opt.taylor_epsilon, to);
  ci.c_taylor = tc.c;
  ci.c_hat_taylor = tc.c_hat;

  std::vector<GridField> fields;
  for (const FeField& w : random_smooth_family(mesh, opt.family_size, opt.family_amplitude, opt.family_seed))
    for (GridField& g : component_fields(mesh, w)) fields.push_back(std::move(g));
  const std::size_t random_fields = fields.size();
  for (const FeField& v : extra)
    for (GridField& g : component_fields(mesh, FeField{v.dim, v.values - u_e.values})) fields.push_back(std::move(g));
  ci.j2 = fit_interpolation_constant(fields, 2, 3);

  if (ci.k_hat > 0) {
    ci.delta_star = neighborhood_radius(ci.k_hat, ci.c_taylor, ci.j2, ci.nn, opt.delta_cap);
    ci.transfer_radius = transfer_radius(ci.k_hat, ci.c_hat_taylor, ci.j2, ci.nn, opt.delta_cap);
  }
  if (taylor_out) *taylor_out = tc;
  if (eigen_out) *eigen_out = ge;
  if (manifest_out) {
    Json m;
    m["kind"] = "random smooth displacement fields, gradient components on the quadrature grid";
    m["seed"] = opt.family_seed;
    m["size"] = opt.family_size;
    m["amplitude"] = opt.family_amplitude;
    m["random_component_fields"] = random_fields;
    m["candidate_component_fields"] = fields.size() - random_fields;
    m["p"] = 2;
    m["q"] = 3;
    *manifest_out = std::move(m);
  }
  return ci;
}

GateOutcome Certificate::verdict() const {
  GateOutcome worst = GateOutcome::Pass;
  for (const auto& [name, m] : measurements)
    if (!m.pass) return GateOutcome::AssertionViolated;
  for (const CandidateResult& c : candidates) {
    if (c.outcome == GateOutcome::AssertionViolated) return GateOutcome::AssertionViolated;
    if (c.outcome == GateOutcome::Inapplicable) worst = GateOutcome::Inapplicable;
  }
  return worst;
}

Certificate small_strain_uniqueness(const Problem& pr, const FeField& u_e, const std::vector<FeField>& candidates,
                                    const CertifyOptions& opt) {
  const Mesh& mesh = pr.mesh;
  const int n = mesh.dim();
  Certificate cert;
  cert.problem_id = opt.problem_id;
  cert.strain_delta = opt.strain_delta;

  std::vector<Vec> points;
  const std::size_t stride = std::max<std::size_t>(1, mesh.element_count() / 8);
  for (std::size_t e = 0; e < mesh.element_count(); e += stride) points.push_back(mesh.qp(e, 0).x);
  ConstitutiveReport cr;
  try {
    cr = check_constitutive(pr.material, n, opt.constitutive_samples, opt.constitutive_seed, points);
  } catch (const Error& err) {
    fail(ErrorCode::HypothesisUnmet, std::string("material hypothesis: ") + err.what());
  }
  if (cr.stress_at_identity > 1e-12) fail(ErrorCode::HypothesisUnmet, "reference configuration is not stress free");
  if (!(cr.coercivity_at_identity > 0))
    fail(ErrorCode::HypothesisUnmet, "elasticity tensor at the identity is not uniformly positive on symmetric matrices");
  cert.measurements["constitutive.stress_at_identity"] = {cr.stress_at_identity, 1e-12, true};
  cert.measurements["constitutive.coercivity_at_identity"] = {cr.coercivity_at_identity, 0, true};

  cert.residual_inf = residual(pr.material, mesh, pr.loads, u_e).lpNorm<Eigen::Infinity>();
  if (cert.residual_inf > opt.equilibrium_tol) fail(ErrorCode::HypothesisUnmet, "u_e is not a discrete equilibrium");
  cert.measurements["equilibrium.residual_inf"] = {cert.residual_inf, opt.equilibrium_tol, true};

  cert.ue_strain_sup = strain_sup(mesh, u_e);
  if (!(cert.ue_strain_sup < opt.strain_delta)) fail(ErrorCode::HypothesisUnmet, "u_e violates the small-strain bound");
  cert.measurements["ue.strain_sup"] = {cert.ue_strain_sup, opt.strain_delta, true};
  cert.ue_dist_sup = rotation_distance_sup(mesh, u_e);
  if (!(cert.ue_dist_sup < opt.ball_radius)) fail(ErrorCode::HypothesisUnmet, "grad u_e leaves the rotation-distance ball B");
  cert.measurements["ue.dist_sup"] = {cert.ue_dist_sup, opt.ball_radius, true};

  std::vector<FeField> admissible;
  for (const FeField& v : candidates) {
    require_dirichlet_match(mesh, u_e, v);
    if (std::isfinite(rotation_distance_sup(mesh, v))) admissible.push_back(v);
  }
  Json manifest;
  cert.inputs = prepare_inputs(pr, u_e, admissible, opt, &cert.taylor, &cert.coercivity, &manifest);
  cert.measurements["coercivity.kappa"] = {cert.inputs.kappa, 0, cert.inputs.kappa > 0};
  cert.measurements["coercivity.certified_lower"] = {cert.coercivity.certified_lower, 0, cert.coercivity.certified_lower > 0};
  cert.measurements["delta_star"] = {cert.inputs.delta_star, 0, cert.inputs.delta_star > 0};

  const double p_close = opt.closeness_p > 0 ? opt.closeness_p : n + 1;
  for (std::size_t id = 0; id < candidates.size(); ++id) {
    const FeField& v = candidates[id];
    CandidateResult r;
    r.id = id;
    r.dist_sup = rotation_distance_sup(mesh, v);
    r.strain_sup = std::isfinite(r.dist_sup) ? strain_sup(mesh, v) : INFINITY;
    if (!(r.strain_sup < opt.strain_delta)) {
      r.outcome = GateOutcome::Inapplicable;
      r.reason = "strain bound |C - I| < delta fails";
      cert.candidates.push_back(std::move(r));
      continue;
    }
    if (cert.inputs.k_hat <= 0) {
      r.outcome = GateOutcome::Inapplicable;
      r.reason = "no positive coercivity constant";
      cert.candidates.push_back(std::move(r));
      continue;
    }
    r.rigidity = rigidity_fit(gradient_grid(mesh, v), opt.rigidity_p);
    r.closeness = boundary_rotation_closeness(mesh, u_e, v, p_close);
    r.gate = local_min_gate(pr, u_e, v, cert.inputs);
    r.transfer = direction_positivity_transfer(pr, u_e, v, cert.inputs);
    r.outcome = r.gate->outcome;
    if (r.transfer->outcome == GateOutcome::AssertionViolated) r.outcome = GateOutcome::AssertionViolated;
    if (r.gate->outcome == GateOutcome::Inapplicable) r.reason = gate_reason(*r.gate);
    cert.candidates.push_back(std::move(r));
  }

  if (opt.restarts > 0) {
    cert.multistart = multistart(pr, u_e, opt.restarts, opt.restart_amplitude, opt.restart_seed, {}, &u_e);
    const double worst = cert.multistart->max_pairwise_grad_diff;
    cert.measurements["multistart.max_pairwise_grad_diff"] = {worst, 1e-8, worst <= 1e-8};
  }

  cert.provenance["mesh_hash"] = mesh_hash(mesh);
  cert.provenance["material"] = pr.material.name();
  cert.provenance["j2_family"] = manifest;
  cert.provenance["taylor"] = {{"samples", cert.taylor.samples}, {"seed", cert.taylor.seed},
                               {"delta", cert.taylor.delta}, {"epsilon", cert.taylor.epsilon}};
  cert.provenance["constitutive"] = {{"samples", opt.constitutive_samples}, {"seed", opt.constitutive_seed}};
  return cert;
}

std::vector<FeField> perturbed_candidates(const Mesh& mesh, const FeField& u_e, const std::vector<double>& amplitudes,
                                          std::size_t modes, std::uint64_t seed) {
  const std::vector<double> phi = dirichlet_cutoff(mesh);
  std::vector<FeField> shapes;
  for (FeField f : random_smooth_family(mesh, modes, 1, seed)) {
    for (std::size_t i = 0; i < mesh.node_count(); ++i) f.set(i, phi[i] * f.at(i));
    const double g = gradient_sup(mesh, f);
    if (g > 0) f.values /= g;
    shapes.push_back(std::move(f));
  }
  std::vector<FeField> out;
  for (double a : amplitudes)
    for (const FeField& f : shapes) out.push_back(FeField{u_e.dim, u_e.values + a * f.values});
  return out;
}

Certificate bmo_gate_certificate(const Problem& pr, const FeField& u_e, const std::vector<FeField>& candidates,
                                 const CertifyOptions& opt) {
  const Mesh& mesh = pr.mesh;
  Certificate cert;
  cert.problem_id = opt.problem_id;
  cert.residual_inf = residual(pr.material, mesh, pr.loads, u_e).lpNorm<Eigen::Infinity>();
  if (cert.residual_inf > opt.equilibrium_tol) fail(ErrorCode::HypothesisUnmet, "u_e is not a discrete equilibrium");
  cert.measurements["equilibrium.residual_inf"] = {cert.residual_inf, opt.equilibrium_tol, true};
  cert.ue_strain_sup = strain_sup(mesh, u_e);
  cert.ue_dist_sup = rotation_distance_sup(mesh, u_e);
  if (!(cert.ue_dist_sup < opt.ball_radius)) fail(ErrorCode::HypothesisUnmet, "grad u_e leaves the rotation-distance ball B");
  cert.measurements["ue.dist_sup"] = {cert.ue_dist_sup, opt.ball_radius, true};

  std::vector<FeField> admissible;
  for (const FeField& v : candidates) {
    require_dirichlet_match(mesh, u_e, v);
    if (std::isfinite(rotation_distance_sup(mesh, v))) admissible.push_back(v);
  }
  Json manifest;
  cert.inputs = prepare_inputs(pr, u_e, admissible, opt, &cert.taylor, &cert.coercivity, &manifest);
  if (!(cert.inputs.kappa > 0)) fail(ErrorCode::HypothesisUnmet, "second variation at u_e is not coercive");
  cert.measurements["coercivity.kappa"] = {cert.inputs.kappa, 0, true};
  cert.measurements["coercivity.certified_lower"] = {cert.coercivity.certified_lower, 0, cert.coercivity.certified_lower > 0};
  cert.measurements["delta_star"] = {cert.inputs.delta_star, 0, cert.inputs.delta_star > 0};

  std::vector<CandidateResult> results(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t id) {
    const FeField& v = candidates[id];
    CandidateResult& r = results[id];
    r.id = id;
    r.dist_sup = rotation_distance_sup(mesh, v);
    r.strain_sup = std::isfinite(r.dist_sup) ? strain_sup(mesh, v) : INFINITY;
    r.gate = local_min_gate(pr, u_e, v, cert.inputs);
    r.outcome = r.gate->outcome;
    if (r.outcome == GateOutcome::Inapplicable) {
      r.reason = gate_reason(*r.gate);
      return;
    }
    r.rigidity = rigidity_fit(gradient_grid(mesh, v), opt.rigidity_p);
    r.transfer = direction_positivity_transfer(pr, u_e, v, cert.inputs);
    if (r.transfer->outcome == GateOutcome::AssertionViolated) r.outcome = GateOutcome::AssertionViolated;
  });
  cert.candidates = std::move(results);

  cert.provenance["mesh_hash"] = mesh_hash(mesh);
  cert.provenance["material"] = pr.material.name();
  cert.provenance["j2_family"] = manifest;
  cert.provenance["taylor"] = {{"samples", cert.taylor.samples}, {"seed", cert.taylor.seed},
                               {"delta", cert.taylor.delta}, {"epsilon", cert.taylor.epsilon}};
  return cert;
}

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const GateReport& g) {
  Json j;
  j["outcome"] = to_string(g.outcome);
  j["conditions"] = {{"in_ball", g.in_ball}, {"bmo_small", g.bmo_small}, {"mean_small", g.mean_small}};
  j["dist_sup"] = json_number(g.dist_sup);
  j["bmo"] = json_number(g.bmo);
  j["mean"] = json_number(g.mean);
  j["mean_by_divergence_theorem"] = g.mean_by_divergence;
  j["delta_star"] = json_number(g.delta_star);
  j["grad_w_sq"] = json_number(g.grad_w_sq);
  j["gap"] = json_number(g.gap);
  j["bound"] = json_number(g.bound);
  j["slack"] = json_number(g.slack);
  j["ratio"] = json_number(g.ratio);
  j["gap_ratio_ok"] = g.gap_ratio_ok;
  return j;
}

Json to_json(const TransferReport& t) {
  Json j;
  j["outcome"] = to_string(t.outcome);
  j["conditions"] = {{"in_ball", t.in_ball}, {"bmo_small", t.bmo_small}, {"mean_small", t.mean_small}};
  j["bmo"] = json_number(t.bmo);
  j["mean"] = json_number(t.mean);
  j["radius"] = json_number(t.radius);
  j["lhs"] = json_number(t.lhs);
  j["rhs"] = json_number(t.rhs);
  j["ratio"] = json_number(t.ratio);
  j["kappa_v"] = json_number(t.kappa_v);
  return j;
}

Json to_json(const RigidityReport& r) {
  Json j;
  j["p"] = json_number(r.p);
  j["r_best"] = to_json(r.r_best);
  j["lhs_p"] = json_number(r.lhs_p);
  j["rhs_p"] = json_number(r.rhs_p);
  j["c_emp"] = json_number(r.c_emp);
  j["c_infinite"] = r.c_infinite;
  j["lhs_p_optimal"] = json_number(r.lhs_p_optimal);
  j["bmo_seminorm"] = json_number(r.bmo_seminorm);
  j["dist_sup"] = json_number(r.dist_sup);
  j["m_emp"] = json_number(r.m_emp);
  j["m_infinite"] = r.m_infinite;
  return j;
}

Json to_json(const BoundaryClosenessReport& b) {
  Json j;
  j["r1"] = to_json(b.r1);
  j["r2"] = to_json(b.r2);
  j["rotation_gap"] = json_number(b.rotation_gap);
  j["rotation_rhs"] = json_number(b.rotation_rhs);
  j["a_rotation"] = json_number(b.a_rotation);
  j["gradient_l1"] = json_number(b.gradient_l1);
  j["dist_rhs"] = json_number(b.dist_rhs);
  j["a_l1"] = json_number(b.a_l1);
  return j;
}

Json to_json(const MultiStartReport& m) {
  Json j;
  j["restarts"] = m.restarts;
  j["amplitude"] = json_number(m.amplitude);
  j["seed"] = m.seed;
  j["iterations"] = m.iterations;
  Json e = Json::array();
  for (double v : m.energies) e.push_back(json_number(v));
  j["energies"] = std::move(e);
  j["max_pairwise_grad_diff"] = json_number(m.max_pairwise_grad_diff);
  j["max_residual"] = json_number(m.max_residual);
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["schema_version"] = 1;
  j["scope"] = "discrete, desk-scale";
  j["problem_id"] = c.problem_id;
  j["configuration"] = c.configuration;
  j["verdict"] = to_string(c.verdict());
  j["coercivity_label"] = "discrete coercivity";
  j["kappa"] = json_number(c.inputs.kappa);
  j["k_hat"] = json_number(c.inputs.k_hat);
  j["kappa_certified_lower"] = json_number(c.coercivity.certified_lower);
  j["J2"] = json_number(c.inputs.j2);
  j["c_taylor"] = json_number(c.inputs.c_taylor);
  j["c_hat_taylor"] = json_number(c.inputs.c_hat_taylor);
  j["Nn"] = c.inputs.nn;
  j["ball_radius"] = json_number(c.inputs.ball_radius);
  j["delta_star"] = json_number(c.inputs.delta_star);
  j["transfer_radius"] = json_number(c.inputs.transfer_radius);
  j["strain_delta"] = json_number(c.strain_delta);
  j["ue_strain_sup"] = json_number(c.ue_strain_sup);
  j["ue_dist_sup"] = json_number(c.ue_dist_sup);
  j["residual_inf"] = json_number(c.residual_inf);
  Json meas = Json::object();
  for (const auto& [name, m] : c.measurements)
    meas[name] = {{"lhs", json_number(m.lhs)}, {"rhs", json_number(m.rhs)}, {"pass", m.pass}};
  j["measurements"] = std::move(meas);
  Json cands = Json::array();
  for (const CandidateResult& r : c.candidates) {
    Json cj;
    cj["id"] = r.id;
    cj["outcome"] = to_string(r.outcome);
    cj["reason"] = r.reason;
    cj["strain_sup"] = json_number(r.strain_sup);
    cj["dist_sup"] = json_number(r.dist_sup);
    cj["energy_excess"] = r.gate ? json_number(r.gate->gap) : Json(nullptr);
    if (r.gate) cj["gate"] = to_json(*r.gate);
    if (r.transfer) cj["transfer"] = to_json(*r.transfer);
    if (r.rigidity) cj["rigidity"] = to_json(*r.rigidity);
    if (r.closeness) cj["boundary_closeness"] = to_json(*r.closeness);
    if (!r.extra.empty()) cj["extra"] = r.extra;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  if (c.multistart) j["multistart"] = to_json(*c.multistart);
  j["provenance"] = c.provenance;
  if (!c.extra.empty()) j["extra"] = c.extra;
  return j;
}

}  // namespace rigcert

#include "rigcert/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rigcert/error.hpp"
#include "rigcert/parallel.hpp"
#include "rigcert/random.hpp"

namespace rigcert {

std::string_view to_string(Transport t) { return t == Transport::Exact ? "exact" : "recovered"; }

namespace {

Mat element_gradient(const Mesh& mesh, const FeField& u, std::size_t e, const ShapeGrad& dn) {
  const int n = mesh.dim();
  Mat g = Mat::Zero(n, n);
  const auto& el = mesh.elements()[e];
  for (int a = 0; a < mesh.nodes_per_element(); ++a) g += u.at(el[a]) * dn.col(a).transpose();
  return g;
}

// Nodal average of the element gradients evaluated at each node.
std::vector<Mat> recovered_nodal_gradient(const Mesh& mesh, const FeField& u) {
  const int n = mesh.dim();
  std::vector<Mat> acc(mesh.node_count(), Mat::Zero(n, n));
  std::vector<int> count(mesh.node_count(), 0);
  Vec x;
  ShapeVal sv;
  ShapeGrad dn;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      mesh.map(e, reference_corner(mesh.dim(), a), x, sv, dn);
      const int node = mesh.elements()[e][a];
      acc[node] += element_gradient(mesh, u, e, dn);
      count[node] += 1;
    }
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (count[i] > 0) acc[i] /= count[i];
  return acc;
}

Mat interpolate_nodal(const Mesh& mesh, const std::vector<Mat>& nodal, std::size_t e, const ShapeVal& sv) {
  const int n = mesh.dim();
  Mat f = Mat::Zero(n, n);
  const auto& el = mesh.elements()[e];
  for (int a = 0; a < mesh.nodes_per_element(); ++a) f += sv(a) * nodal[el[a]];
  return f;
}

void check_injective_nodes(const std::vector<Vec>& images) {
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return images[a](0) < images[b](0); });
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (images[order[j]](0) - images[order[i]](0) >= 1e-12) break;
      if ((images[order[j]] - images[order[i]]).norm() < 1e-12)
        fail(ErrorCode::NotInjective, "nodes " + std::to_string(order[i]) + " and " + std::to_string(order[j]) +
                                          " have the same image");
    }
}

// Discrepancy relative to the integral of the absolute integrand, so that
// identities whose two sides both vanish are not scored on roundoff.
double relative(double a, double b, double scale) { return scale > 0 && std::isfinite(scale) ? std::abs(a - b) / scale : 0; }

}  // namespace

DeformedConfig deform_configuration(const Mesh& mesh, const FeField& u_e, Transport transport) {
  if (u_e.dim != mesh.dim() || u_e.node_count() != mesh.node_count())
    fail(ErrorCode::DimensionMismatch, "u_e does not match the mesh");
  const int n = mesh.dim();
  const int nq = mesh.qp_per_element();
  DeformedConfig cfg{mesh, {}, {}, {}, {}, {}, {}, transport, INFINITY, 0};

  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < nq; ++q) {
      const double det = gradient(mesh, u_e, e, q).determinant();
      if (!(det > 0))
        fail(ErrorCode::DeterminantViolation, "det grad u_e = " + std::to_string(det) + " at element " + std::to_string(e));
    }

  cfg.forward.resize(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) cfg.forward[i] = u_e.at(i);
  check_injective_nodes(cfg.forward);
  try {
    cfg.mesh = mesh.with_nodes(cfg.forward);
  } catch (const Error& err) {
    fail(ErrorCode::NotInjective, std::string("image element inverted: ") + err.what());
  }
  // Q1 images can fold at a corner while staying positive at the Gauss points.
  Vec x;
  ShapeVal sv;
  ShapeGrad dn;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int a = 0; a < mesh.nodes_per_element(); ++a)
      if (!(cfg.mesh.map(e, reference_corner(mesh.dim(), a), x, sv, dn) > 0))
        fail(ErrorCode::NotInjective, "image element " + std::to_string(e) + " folds at a corner");

  std::vector<Mat> nodal;
  if (transport == Transport::Recovered) nodal = recovered_nodal_gradient(mesh, u_e);
  const std::size_t total = mesh.element_count() * nq;
  cfg.reference_x.resize(total);
  cfg.f.resize(total);
  cfg.f_inv.resize(total);
  cfg.det_f.resize(total);
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < nq; ++q) {
      const std::size_t k = e * nq + q;
      const QuadPoint& p = mesh.qp(e, q);
      cfg.reference_x[k] = p.x;
      cfg.f[k] = transport == Transport::Exact ? gradient(mesh, u_e, e, q) : interpolate_nodal(mesh, nodal, e, p.n);
      cfg.det_f[k] = cfg.f[k].determinant();
      if (!(cfg.det_f[k] > 0)) fail(ErrorCode::DeterminantViolation, "recovered gradient has det <= 0");
      cfg.f_inv[k] = cfg.f[k].inverse();
      cfg.min_det = std::min(cfg.min_det, cfg.det_f[k]);
      cfg.inverse_residual = std::max(cfg.inverse_residual, fnorm(cfg.f_inv[k] * cfg.f[k] - identity(n)));
    }
  for (std::size_t t = 0; t < mesh.traction_facets().size(); ++t) {
    const std::size_t e = static_cast<std::size_t>(mesh.facets()[mesh.traction_facets()[t]].element);
    for (int q = 0; q < mesh.qp_per_facet(); ++q) {
      const FacetPoint& p = mesh.traction_qp(t, q);
      cfg.facet_f.push_back(transport == Transport::Exact ? element_gradient(mesh, u_e, e, p.dn)
                                                          : interpolate_nodal(mesh, nodal, e, p.n));
    }
  }
  return cfg;
}

FeField transport_field(const DeformedConfig& cfg, const FeField& v) {
  if (v.dim != cfg.mesh.dim() || v.node_count() != cfg.mesh.node_count())
    fail(ErrorCode::DimensionMismatch, "field does not match the configuration");
  return v;
}

PushedMaterial::PushedMaterial(const Material& base, const DeformedConfig& cfg)
    : base_(base), qp_per_element_(cfg.mesh.qp_per_element()), reference_x_(cfg.reference_x), f_(cfg.f), det_f_(cfg.det_f) {
  deformed_x_.reserve(f_.size());
  for (std::size_t e = 0; e < cfg.mesh.element_count(); ++e)
    for (int q = 0; q < qp_per_element_; ++q) deformed_x_.push_back(cfg.mesh.qp(e, q).x);
}

std::size_t PushedMaterial::locate(const MaterialPoint& p) const {
  if (p.element >= 0 && p.qp >= 0) {
    const std::size_t k = static_cast<std::size_t>(p.element) * qp_per_element_ + p.qp;
    if (k < f_.size()) return k;
  }
  std::size_t best = 0;
  double dmin = INFINITY;
  for (std::size_t k = 0; k < deformed_x_.size(); ++k) {
    const double d = (deformed_x_[k] - p.x).squaredNorm();
    if (d < dmin) dmin = d, best = k;
  }
  return best;
}

MaterialPoint PushedMaterial::reference_point(std::size_t k) const {
  return {reference_x_[k], static_cast<long>(k / qp_per_element_), static_cast<int>(k % qp_per_element_)};
}

double PushedMaterial::energy(const MaterialPoint& p, const Mat& g) const {
  const std::size_t k = locate(p);
  return base_.energy(reference_point(k), g * f_[k]) / det_f_[k];
}

Mat PushedMaterial::stress(const MaterialPoint& p, const Mat& g) const {
  const std::size_t k = locate(p);
  return base_.stress(reference_point(k), g * f_[k]) * f_[k].transpose() / det_f_[k];
}

Mat PushedMaterial::elasticity_apply(const MaterialPoint& p, const Mat& g, const Mat& h) const {
  const std::size_t k = locate(p);
  return base_.elasticity_apply(reference_point(k), g * f_[k], h * f_[k]) * f_[k].transpose() / det_f_[k];
}

PushedMaterial pushforward_material(const Material& m, const DeformedConfig& cfg) { return PushedMaterial(m, cfg); }

LoadSet pushforward_loads(const Mesh& mesh, const LoadSet& loads, const DeformedConfig& cfg) {
  if (loads.body.size() != cfg.det_f.size() || loads.traction.size() != cfg.facet_f.size())
    fail(ErrorCode::DimensionMismatch, "loads do not match the configuration");
  LoadSet out;
  out.body.reserve(loads.body.size());
  for (std::size_t k = 0; k < loads.body.size(); ++k) out.body.push_back(loads.body[k] / cfg.det_f[k]);
  const int nfq = mesh.qp_per_facet();
  for (std::size_t k = 0; k < loads.traction.size(); ++k) {
    const Mat& f = cfg.facet_f[k];
    const Vec& normal = mesh.traction_qp(k / nfq, static_cast<int>(k % nfq)).normal;
    const double stretch = (f.inverse().transpose() * normal).norm();
    if (stretch < 1e-12) fail(ErrorCode::DegenerateNormal, "|F^-T n| vanishes on a traction facet");
    out.traction.push_back(loads.traction[k] / (stretch * f.determinant()));
  }
  out.dirichlet = loads.dirichlet;
  return out;
}

std::array<std::string_view, 5> cov_line_names() {
  return {"energy", "stress_power", "elasticity_form", "body_work", "traction_work"};
}

CovReport verify_cov_identities(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u_e,
                                const FeField& v, const FeField& w, Transport transport) {
  const DeformedConfig cfg = deform_configuration(mesh, u_e, transport);
  const PushedMaterial mu(m, cfg);
  const LoadSet lu = pushforward_loads(mesh, loads, cfg);
  const FeField vh = transport_field(cfg, v), wh = transport_field(cfg, w);
  const Mesh& md = cfg.mesh;
  const int nq = mesh.qp_per_element();

  // Per-element partial sums of the ten sides and their absolute
  // integrands, reduced in element order.
  std::vector<std::array<double, 16>> part(mesh.element_count());
  parallel_for(mesh.element_count(), [&](std::size_t e) {
    std::array<double, 16> s{};
    const auto add = [&s](int i, double v) { s[i] += v, s[8 + i] += std::abs(v); };
    for (int q = 0; q < nq; ++q) {
      const QuadPoint& p = mesh.qp(e, q);
      const QuadPoint& pd = md.qp(e, q);
      const MaterialPoint mp{p.x, static_cast<long>(e), q}, mpd{pd.x, static_cast<long>(e), q};
      const Mat gv = gradient(mesh, v, e, q), gw = gradient(mesh, w, e, q);
      const Mat gvh = gradient(md, vh, e, q), gwh = gradient(md, wh, e, q);
      add(0, p.weight * m.energy(mp, gv));
      add(1, pd.weight * mu.energy(mpd, gvh));
      add(2, p.weight * ddot(m.stress(mp, gv), gw));
      add(3, pd.weight * ddot(mu.stress(mpd, gvh), gwh));
      add(4, p.weight * ddot(gw, m.elasticity_apply(mp, gv, gw)));
      add(5, pd.weight * ddot(gwh, mu.elasticity_apply(mpd, gvh, gwh)));
      const std::size_t k = e * nq + q;
      add(6, p.weight * loads.body[k].dot(value(mesh, w, e, q)));
      add(7, pd.weight * lu.body[k].dot(value(md, wh, e, q)));
    }
    part[e] = s;
  });
  std::array<double, 10> sum{}, mag{};
  for (const auto& s : part)
    for (int i = 0; i < 8; ++i) sum[i] += s[i], mag[i] += s[8 + i];
  for (std::size_t t = 0; t < mesh.traction_facets().size(); ++t) {
    const Facet& fc = mesh.facets()[mesh.traction_facets()[t]];
    for (int q = 0; q < mesh.qp_per_facet(); ++q) {
      const FacetPoint& p = mesh.traction_qp(t, q);
      const FacetPoint& pd = md.traction_qp(t, q);
      Vec wv = Vec::Zero(mesh.dim()), whv = Vec::Zero(mesh.dim());
      for (int a = 0; a < mesh.nodes_per_element(); ++a) {
        wv += p.n(a) * w.at(mesh.elements()[fc.element][a]);
        whv += pd.n(a) * wh.at(md.elements()[fc.element][a]);
      }
      const std::size_t k = t * mesh.qp_per_facet() + q;
      const double a = p.weight * loads.traction[k].dot(wv), b = pd.weight * lu.traction[k].dot(whv);
      sum[8] += a, mag[8] += std::abs(a);
      sum[9] += b, mag[9] += std::abs(b);
    }
  }
  CovReport r;
  r.transport = transport;
  double largest = 0;
  for (int i = 0; i < 10; ++i) largest = std::max(largest, mag[i]);
  for (int i = 0; i < 5; ++i) {
    double scale = std::max(mag[2 * i], mag[2 * i + 1]);
    // a line whose integrand is roundoff next to the others (S(I) = 0, say)
    // reads 0 = 0
    if (scale < 1e-12 * largest) scale = INFINITY;
    r.lines[i] = {sum[2 * i], sum[2 * i + 1], relative(sum[2 * i], sum[2 * i + 1], scale)};
    r.max_relative = std::max(r.max_relative, r.lines[i].relative);
  }
  return r;
}

StrainDistReport strain_diff_to_dist(const Mesh& mesh, const FeField& u_e, const FeField& v) {
  const int n = mesh.dim();
  const double rn = std::sqrt(static_cast<double>(n));
  const int nq = mesh.qp_per_element();
  const std::size_t total = mesh.element_count() * nq;
  std::vector<Mat> fe(total), g(total);
  StrainDistReport r;
  r.upsilon_min = INFINITY;
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    for (int q = 0; q < nq; ++q) {
      const std::size_t k = e * nq + q;
      fe[k] = gradient(mesh, u_e, e, q);
      g[k] = gradient(mesh, v, e, q);
      if (!(fe[k].determinant() > 0)) fail(ErrorCode::DeterminantViolation, "det grad u_e <= 0 at element " + std::to_string(e));
      if (!(g[k].determinant() > 0)) fail(ErrorCode::DeterminantViolation, "det grad v <= 0 at element " + std::to_string(e));
      r.upsilon_max = std::max(r.upsilon_max, fnorm(fe[k]));
      r.upsilon_min = std::min(r.upsilon_min, 1 / fnorm(fe[k].inverse()));
    }
  const double lo2 = r.upsilon_min * r.upsilon_min, hi2 = r.upsilon_max * r.upsilon_max;
  r.points.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    StrainDistPoint& pt = r.points[k];
    pt.d = dist_to_rotations(g[k] * fe[k].inverse());
    pt.strain_diff = fnorm(g[k].transpose() * g[k] - fe[k].transpose() * fe[k]);
    const double mid = rn * pt.strain_diff;
    const double tol = 1e-12 * (1 + mid);
    pt.lower_ok = lo2 * pt.d * pt.d <= mid + tol;
    pt.upper_ok = mid <= hi2 * pt.d * rn * (pt.d + 2 * rn) + tol;
    pt.linear_ok = lo2 * pt.d <= pt.strain_diff + tol;
    if (!(pt.lower_ok && pt.upper_ok && pt.linear_ok)) ++r.violations;
    r.d_sup = std::max(r.d_sup, pt.d);
    r.strain_diff_sup = std::max(r.strain_diff_sup, pt.strain_diff);
  }
  return r;
}

Certificate certify_strain_neighborhood(const Problem& pr, const FeField& u_e, const std::vector<FeField>& candidates,
                                        const CertifyOptions& opt) {
  const Mesh& mesh = pr.mesh;
  const int n = mesh.dim();
  Certificate cert;
  cert.problem_id = opt.problem_id;
  cert.configuration = "deformed";
  cert.strain_delta = opt.strain_delta;

  cert.residual_inf = residual(pr.material, mesh, pr.loads, u_e).lpNorm<Eigen::Infinity>();
  if (cert.residual_inf > opt.equilibrium_tol) fail(ErrorCode::HypothesisUnmet, "u_e is not a discrete equilibrium");
  cert.measurements["equilibrium.residual_inf"] = {cert.residual_inf, opt.equilibrium_tol, true};

  const double kappa_ref = coercivity_constant(second_variation_matrix(pr.material, mesh, u_e), gradient_gram(mesh));
  if (!(kappa_ref > 0)) fail(ErrorCode::HypothesisUnmet, "second variation at u_e is not uniformly positive");
  cert.measurements["reference.coercivity.kappa"] = {kappa_ref, 0, true};

  const DeformedConfig cfg = deform_configuration(mesh, u_e, Transport::Exact);
  const PushedMaterial mu(pr.material, cfg);
  const LoadSet lu = pushforward_loads(mesh, pr.loads, cfg);
  const Problem pu{mu, cfg.mesh, lu};
  const FeField id = identity_field(cfg.mesh);

  // The transported equilibrium is the identity map of the deformed body.
  double id_err = 0;
  for (std::size_t e = 0; e < cfg.mesh.element_count(); ++e)
    for (int q = 0; q < cfg.mesh.qp_per_element(); ++q)
      id_err = std::max(id_err, fnorm(gradient(cfg.mesh, transport_field(cfg, u_e), e, q) - identity(n)));
  cert.measurements["deformed.identity_gradient"] = {id_err, 1e-10, id_err <= 1e-10};
  const double res_def = residual(mu, cfg.mesh, lu, id).lpNorm<Eigen::Infinity>();
  cert.measurements["deformed.residual_inf"] = {res_def, opt.equilibrium_tol, res_def <= opt.equilibrium_tol};

  const double energy_ref = total_energy(pr.material, mesh, pr.loads, u_e);
  const double energy_def = total_energy(mu, cfg.mesh, lu, id);
  const double energy_slack = 1e-10 * (1 + std::abs(energy_ref));
  cert.measurements["cov.energy_at_equilibrium"] = {std::abs(energy_ref - energy_def), energy_slack,
                                                    std::abs(energy_ref - energy_def) <= energy_slack};

  std::vector<FeField> admissible;
  for (const FeField& v : candidates)
    if (std::isfinite(rotation_distance_sup(mesh, v))) admissible.push_back(transport_field(cfg, v));
  Json manifest;
  cert.inputs = prepare_inputs(pu, id, admissible, opt, &cert.taylor, &cert.coercivity, &manifest);
  cert.ue_strain_sup = strain_sup(cfg.mesh, id);
  cert.ue_dist_sup = rotation_distance_sup(cfg.mesh, id);
  cert.measurements["coercivity.kappa"] = {cert.inputs.kappa, 0, cert.inputs.kappa > 0};
  cert.measurements["coercivity.certified_lower"] = {cert.coercivity.certified_lower, 0, cert.coercivity.certified_lower > 0};
  cert.measurements["delta_star"] = {cert.inputs.delta_star, 0, cert.inputs.delta_star > 0};

  const double p_close = opt.closeness_p > 0 ? opt.closeness_p : n + 1;
  double worst_mismatch = 0;
  for (std::size_t cid = 0; cid < candidates.size(); ++cid) {
    const FeField& v = candidates[cid];
    CandidateResult r;
    r.id = cid;
    r.dist_sup = rotation_distance_sup(mesh, v);
    if (!std::isfinite(r.dist_sup)) {
      r.strain_sup = INFINITY;
      r.outcome = GateOutcome::Inapplicable;
      r.reason = "det grad v <= 0";
      cert.candidates.push_back(std::move(r));
      continue;
    }
    for (int node : mesh.dirichlet_nodes())
      if ((u_e.at(node) - v.at(node)).cwiseAbs().maxCoeff() > 1e-12)
        fail(ErrorCode::BoundaryMismatch, "candidate differs from u_e on D at node " + std::to_string(node));
    const StrainDistReport sd = strain_diff_to_dist(mesh, u_e, v);
    r.strain_sup = sd.strain_diff_sup;
    r.dist_sup = sd.d_sup;  // dist(grad v-hat, SO(n))
    r.extra["strain_difference_sup"] = json_number(sd.strain_diff_sup);
    r.extra["upsilon_max"] = json_number(sd.upsilon_max);
    r.extra["upsilon_min"] = json_number(sd.upsilon_min);
    r.extra["deformed_dist_sup"] = json_number(sd.d_sup);
    r.extra["deformed_dist_bound"] = json_number(sd.strain_diff_sup / (sd.upsilon_min * sd.upsilon_min));
    r.extra["sandwich_violations"] = sd.violations;
    if (sd.violations > 0) {
      r.outcome = GateOutcome::AssertionViolated;
      r.reason = "strain-difference sandwich violated";
      cert.candidates.push_back(std::move(r));
      continue;
    }
    if (!(sd.strain_diff_sup < opt.strain_delta)) {
      r.outcome = GateOutcome::Inapplicable;
      r.reason = "strain difference |G^T G - F^T F| < epsilon fails";
      cert.candidates.push_back(std::move(r));
      continue;
    }
    if (cert.inputs.k_hat <= 0) {
      r.outcome = GateOutcome::Inapplicable;
      r.reason = "no positive coercivity constant";
      cert.candidates.push_back(std::move(r));
      continue;
    }
    const FeField vh = transport_field(cfg, v);
    r.rigidity = rigidity_fit(gradient_grid(cfg.mesh, vh), opt.rigidity_p);
    r.closeness = boundary_rotation_closeness(cfg.mesh, id, vh, p_close);
    r.gate = local_min_gate(pu, id, vh, cert.inputs);
    r.transfer = direction_positivity_transfer(pu, id, vh, cert.inputs);
    r.outcome = r.gate->outcome;
    if (r.transfer->outcome == GateOutcome::AssertionViolated) r.outcome = GateOutcome::AssertionViolated;
    if (r.gate->outcome == GateOutcome::Inapplicable)
      r.reason = !r.gate->in_ball ? "grad v-hat leaves B" : !r.gate->bmo_small ? "BMO distance exceeds delta*" : "mean gradient distance exceeds delta*";
    const double excess_ref = total_energy(pr.material, mesh, pr.loads, v) - energy_ref;
    const double mismatch = std::abs(excess_ref - r.gate->gap);
    worst_mismatch = std::max(worst_mismatch, mismatch);
    r.extra["reference_energy_excess"] = json_number(excess_ref);
    r.extra["deformed_energy_excess"] = json_number(r.gate->gap);
    r.extra["excess_mismatch"] = json_number(mismatch);
    cert.candidates.push_back(std::move(r));
  }
  cert.measurements["cov.excess_mismatch"] = {worst_mismatch, energy_slack, worst_mismatch <= energy_slack};

  // Identities on a seeded pair (u_e + smooth field, smooth field), both transports.
  const auto fam = random_smooth_family(mesh, 2, opt.family_amplitude, opt.family_seed + 1);
  const FeField v{n, u_e.values + fam[0].values};
  for (Transport t : {Transport::Exact, Transport::Recovered})
    cert.extra["cov_identities"][std::string(to_string(t))] = to_json(verify_cov_identities(pr.material, mesh, pr.loads, u_e, v, fam[1], t));
  cert.extra["deformed_min_det"] = json_number(cfg.min_det);
  cert.extra["inverse_residual"] = json_number(cfg.inverse_residual);
  cert.extra["reference_kappa"] = json_number(kappa_ref);
  cert.extra["reference_residual_inf"] = json_number(cert.residual_inf);
  cert.extra["deformed_residual_inf"] = json_number(res_def);

  cert.provenance["mesh_hash"] = mesh_hash(mesh);
  cert.provenance["deformed_mesh_hash"] = mesh_hash(cfg.mesh);
  cert.provenance["material"] = mu.name();
  cert.provenance["j2_family"] = manifest;
  cert.provenance["j2_grid"] = "reference lattice carried to the deformed configuration";
  cert.provenance["taylor"] = {{"samples", cert.taylor.samples}, {"seed", cert.taylor.seed},
                               {"delta", cert.taylor.delta}, {"epsilon", cert.taylor.epsilon}};
  return cert;
}

Json to_json(const CovReport& c) {
  Json j;
  j["transport"] = to_string(c.transport);
  const auto names = cov_line_names();
  for (int i = 0; i < 5; ++i)
    j["lines"][std::string(names[i])] = {{"reference", json_number(c.lines[i].lhs)},
                                         {"deformed", json_number(c.lines[i].rhs)},
                                         {"relative", json_number(c.lines[i].relative)}};
  j["max_relative"] = json_number(c.max_relative);
  return j;
}

}  // namespace rigcert

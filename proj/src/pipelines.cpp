#include "rigcert/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include "rigcert/error.hpp"
#include "rigcert/harmonic.hpp"
#include "rigcert/parallel.hpp"
#include "rigcert/pushforward.hpp"
#include "rigcert/random.hpp"
#include "rigcert/rigidity.hpp"
#include "rigcert/solver.hpp"

namespace rigcert {

namespace {

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    out_.imbue(std::locale::classic());
    out_ << std::setprecision(17);
    bool first = true;
    for (std::string_view h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ","), put(cells), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  void put(double v) { out_ << v; }
  void put(bool v) { out_ << (v ? "true" : "false"); }
  void put(std::string_view v) { out_ << v; }
  void put(const std::string& v) { out_ << v; }
  void put(const char* v) { out_ << v; }
  template <class I>
    requires std::is_integral_v<I>
  void put(I v) { out_ << v; }

  std::ostringstream out_;
};

Json measurement(double lhs, double rhs, bool pass) {
  return {{"lhs", json_number(lhs)}, {"rhs", json_number(rhs)}, {"pass", pass}};
}

GateOutcome verdict_of(const Json& measurements, GateOutcome worst = GateOutcome::Pass) {
  for (const auto& [name, m] : measurements.items())
    if (!m["pass"].get<bool>()) return GateOutcome::AssertionViolated;
  return worst;
}

Json header(const Scenario& s) {
  Json j;
  j["schema_version"] = 1;
  j["scenario"] = s.name;
  j["pipeline"] = to_string(s.pipeline);
  j["seed"] = s.seed;
  return j;
}

// Mesh, material and loads built once per scenario.
struct Setup {
  Mesh mesh;
  std::unique_ptr<Material> material;
  LoadSet loads;

  explicit Setup(const Scenario& s, int cells = 0)
      : mesh(build_mesh(s.mesh, cells)), material(build_material(s.material)), loads(build_loads(mesh, s.loads)) {}
  Problem problem() const { return {*material, mesh, loads}; }
};

SolveResult solve(const Scenario& s, const Setup& st) {
  FeField u0 = s.initial == "identity" ? identity_field(st.mesh) : placement_field(st.mesh, s.loads);
  apply_dirichlet(st.mesh, st.loads, u0);
  return solve_equilibrium(*st.material, st.mesh, st.loads, u0, s.solver);
}

std::string newton_table(const SolveResult& r) {
  Csv t{"iteration", "energy", "residual_inf", "step", "halvings", "shift"};
  for (const NewtonStep& k : r.log) t.row(k.iteration, k.energy, k.residual_inf, k.step, k.halvings, k.shift);
  return t.str();
}

Json solve_summary(const SolveResult& r) {
  return {{"iterations", r.iterations}, {"energy", json_number(r.energy)}, {"residual_inf", json_number(r.residual_inf)}};
}

Json provenance(const Scenario& s, const Setup& st) {
  return {{"mesh_hash", mesh_hash(st.mesh)},
          {"mesh", s.mesh.source == "file" ? s.mesh.file.filename().string() : s.mesh.generator},
          {"material", st.material->name()},
          {"initial", s.initial}};
}

RunResult run_solve(const Scenario& s) {
  const Setup st(s);
  const SolveResult r = solve(s, st);
  RunResult out;
  Json j = header(s);
  Json meas = Json::object();
  meas["solver.residual_inf"] = measurement(r.residual_inf, s.solver.tol, r.residual_inf <= s.solver.tol);
  const double mismatch = dirichlet_mismatch(st.mesh, st.loads, r.u);
  meas["solver.dirichlet_mismatch"] = measurement(mismatch, 1e-12, mismatch <= 1e-12);
  const double det = min_jacobian(st.mesh, r.u);
  meas["solver.min_jacobian"] = measurement(det, 0, det > 0);
  out.verdict = verdict_of(meas);
  j["verdict"] = to_string(out.verdict);
  j["measurements"] = meas;
  Json sol = solve_summary(r);
  sol["min_corner_jacobian"] = json_number(min_corner_jacobian(st.mesh, r.u));
  sol["strain_sup"] = json_number(strain_sup(st.mesh, r.u));
  sol["dist_sup"] = json_number(rotation_distance_sup(st.mesh, r.u));
  j["solve"] = std::move(sol);
  j["provenance"] = provenance(s, st);
  out.report = std::move(j);
  out.tables["newton.csv"] = newton_table(r);
  return out;
}

// Scenario header followed by the certificate's own keys.
Json certificate_report(const Scenario& s, const Certificate& cert, const SolveResult& r, const Setup& st) {
  Json j = header(s);
  const Json body = to_json(cert);
  for (const auto& [key, value] : body.items())
    if (key != "schema_version") j[key] = value;
  j["solve"] = solve_summary(r);
  j["provenance"]["scenario"] = provenance(s, st);
  return j;
}

// One row per candidate; amplitude and mode follow the candidate order.
std::string gap_table(const Scenario& s, const Certificate& cert) {
  Csv t{"candidate", "amplitude", "mode", "outcome", "dist_sup", "bmo", "mean", "delta_star",
        "grad_w_sq", "gap", "bound", "ratio", "gap_ratio_ok"};
  for (const CandidateResult& c : cert.candidates) {
    const double amp = s.amplitudes[c.id / s.candidate_modes];
    const std::size_t mode = c.id % s.candidate_modes;
    if (!c.gate) {
      t.row(c.id, amp, mode, to_string(c.outcome), c.dist_sup, NAN, NAN, cert.inputs.delta_star, NAN, NAN, NAN, NAN, false);
      continue;
    }
    const GateReport& g = *c.gate;
    t.row(c.id, amp, mode, to_string(c.outcome), g.dist_sup, g.bmo, g.mean, g.delta_star, g.grad_w_sq, g.gap, g.bound,
          g.ratio, g.gap_ratio_ok);
  }
  return t.str();
}

// Largest amplitude up to which every candidate kept gap >= 0.9 k_hat |grad w|^2.
Json largest_gap_preserving_amplitude(const Scenario& s, const Certificate& cert) {
  Json best = nullptr;
  for (std::size_t a = 0; a < s.amplitudes.size(); ++a) {
    bool all = true;
    for (std::size_t m = 0; m < s.candidate_modes; ++m) {
      const CandidateResult& c = cert.candidates[a * s.candidate_modes + m];
      all = all && c.gate && c.gate->gap_ratio_ok;
    }
    if (!all) break;
    best = json_number(s.amplitudes[a]);
  }
  return best;
}

std::string candidate_table(const Scenario& s, const Certificate& cert) {
  Csv t{"candidate", "amplitude", "mode", "outcome", "reason", "strain_sup", "dist_sup", "gap", "bound", "ratio",
        "transfer_ratio", "c_emp", "a_rotation", "strain_difference_sup", "deformed_dist_sup", "excess_mismatch"};
  auto extra = [](const CandidateResult& c, const char* key) {
    return c.extra.contains(key) && c.extra[key].is_number() ? c.extra[key].get<double>() : NAN;
  };
  for (const CandidateResult& c : cert.candidates) {
    t.row(c.id, s.amplitudes[c.id / s.candidate_modes], c.id % s.candidate_modes, to_string(c.outcome),
          "\"" + c.reason + "\"", c.strain_sup, c.dist_sup, c.gate ? c.gate->gap : NAN, c.gate ? c.gate->bound : NAN,
          c.gate ? c.gate->ratio : NAN, c.transfer ? c.transfer->ratio : NAN, c.rigidity ? c.rigidity->c_emp : NAN,
          c.closeness ? c.closeness->a_rotation : NAN, extra(c, "strain_difference_sup"), extra(c, "deformed_dist_sup"),
          extra(c, "excess_mismatch"));
  }
  return t.str();
}

CertifyOptions certify_options(const Scenario& s) {
  CertifyOptions o = s.certify;
  o.problem_id = s.name;
  return o;
}

RunResult run_certify(const Scenario& s) {
  const Setup st(s);
  const SolveResult r = solve(s, st);
  const Problem pr = st.problem();
  const std::vector<FeField> cands = perturbed_candidates(st.mesh, r.u, s.amplitudes, s.candidate_modes, s.seed);
  const CertifyOptions opt = certify_options(s);
  Certificate cert;
  switch (s.pipeline) {
    case Pipeline::CertifyBmoGate: cert = bmo_gate_certificate(pr, r.u, cands, opt); break;
    case Pipeline::CertifySmallStrain: cert = small_strain_uniqueness(pr, r.u, cands, opt); break;
    default: cert = certify_strain_neighborhood(pr, r.u, cands, opt); break;
  }
  RunResult out;
  out.verdict = cert.verdict();
  out.report = certificate_report(s, cert, r, st);
  out.tables["newton.csv"] = newton_table(r);
  out.tables["candidates.csv"] = candidate_table(s, cert);
  if (s.pipeline != Pipeline::CertifyStrainDiff) {
    out.tables["gap_vs_amplitude.csv"] = gap_table(s, cert);
    out.report["largest_gap_preserving_amplitude"] = largest_gap_preserving_amplitude(s, cert);
  } else {
    Csv t{"transport", "identity", "reference", "deformed", "relative"};
    for (const auto& [transport, rep] : cert.extra["cov_identities"].items())
      for (const auto& [line, v] : rep["lines"].items())
        t.row(transport, line, v["reference"].dump(), v["deformed"].dump(), v["relative"].dump());
    out.tables["cov.csv"] = t.str();
  }
  return out;
}

RunResult run_harmonic(const Scenario& s) {
  RunResult out;
  Json j = header(s);
  Csv t{"cells", "field", "bmo", "sharp_max", "sharp_equals_bmo", "pointwise_violations", "hl_ratio_2", "p", "q",
        "interp_ok", "rh_ok", "j2"};
  Json grids = Json::array();
  std::size_t pointwise = 0, sharp_mismatch = 0, interp_bad = 0, rh_bad = 0;
  for (long cells : s.grid_sizes) {
    const Mesh mesh = build_mesh(s.mesh, static_cast<int>(cells));
    const GridField shape = quadrature_grid(mesh, 0, [](std::size_t, int) { return Mat::Zero(1, 1).eval(); });
    Rng rng(s.seed + static_cast<std::uint64_t>(cells));
    std::vector<GridField> fields(s.fields, shape);
    for (GridField& f : fields)
      for (std::size_t c = 0; c < f.box_cells(); ++c)
        if (f.inside(c)) f.at(c) = uniform(rng, -1, 1);
    const CubeFamily family = cube_family(shape);

    struct Row {
      double bmo = 0, sharp = 0, hl = 0;
      std::size_t violations = 0;
    };
    std::vector<Row> rows(fields.size());
    parallel_for(fields.size(), [&](std::size_t k) {
      const GridField sharp = fs_sharp(fields[k], family);
      Row& r = rows[k];
      r.bmo = bmo_seminorm(fields[k], family);
      for (std::size_t c = 0; c < sharp.box_cells(); ++c)
        if (sharp.inside(c)) r.sharp = std::max(r.sharp, sharp.at(c));
      r.violations = verify_pointwise_bounds(fields[k]).violations;
      r.hl = hl_ratio(fields[k], 2);
    });

    Json g;
    g["cells"] = cells;
    g["grid_extent"] = shape.extent;
    g["cubes"] = family.size();
    Json fits = Json::array();
    for (double p : s.exponents_p)
      for (double q : s.exponents_q) {
        const double j2 = fit_interpolation_constant(fields, p, q);
        const auto [a, b] = rh_exponents(p, q);
        fits.push_back({{"p", p}, {"q", q}, {"j2", json_number(j2)}, {"exponents", {a, b}}});
        for (std::size_t k = 0; k < fields.size(); ++k) {
          const InterpolationReport ir = verify_interpolation(fields[k], p, q, j2);
          interp_bad += !ir.interp_ok;
          rh_bad += !ir.rh_ok;
          const Row& r = rows[k];
          t.row(cells, k, r.bmo, r.sharp, r.sharp == r.bmo, r.violations, r.hl, p, q, ir.interp_ok, ir.rh_ok, j2);
        }
      }
    for (const Row& r : rows) {
      pointwise += r.violations;
      sharp_mismatch += r.sharp != r.bmo;
    }
    g["fits"] = std::move(fits);
    grids.push_back(std::move(g));
  }
  Json meas = Json::object();
  meas["harmonic.pointwise_violations"] = measurement(static_cast<double>(pointwise), 0, pointwise == 0);
  meas["harmonic.sharp_bmo_mismatches"] = measurement(static_cast<double>(sharp_mismatch), 0, sharp_mismatch == 0);
  meas["harmonic.interpolation_violations"] = measurement(static_cast<double>(interp_bad), 0, interp_bad == 0);
  meas["harmonic.reverse_holder_violations"] = measurement(static_cast<double>(rh_bad), 0, rh_bad == 0);
  out.verdict = verdict_of(meas);
  j["verdict"] = to_string(out.verdict);
  j["measurements"] = meas;
  j["fields_per_grid"] = s.fields;
  j["grids"] = std::move(grids);
  j["provenance"] = {{"field_kind", "uniform(-1, 1) per quadrature subcell"}, {"seed_per_grid", "seed + cells"}};
  out.report = std::move(j);
  out.tables["fields.csv"] = t.str();
  return out;
}

RunResult run_rigidity(const Scenario& s) {
  RunResult out;
  Json j = header(s);
  const int n = s.dim();
  Csv t{"refinement", "field", "c_emp", "c_infinite", "m_emp", "bmo_seminorm", "dist_sup", "lhs_p", "rhs_p"};
  Json levels = Json::array();
  std::size_t infinite = 0;
  Rng rng(s.seed);
  std::vector<Mat> rotations;
  for (std::size_t k = 0; k < s.perturbations; ++k) rotations.push_back(random_rotation(n, rng));
  for (long cells : s.refinements) {
    const Mesh mesh = build_mesh(s.mesh, static_cast<int>(cells));
    // same continuum fields at every refinement: R_k (x + f_k(x))
    const auto family = random_smooth_family(mesh, s.perturbations, s.perturbation_amplitude, s.seed);
    std::vector<RigidityReport> reps(s.perturbations);
    parallel_for(s.perturbations, [&](std::size_t k) {
      FeField v = identity_field(mesh);
      for (std::size_t i = 0; i < mesh.node_count(); ++i) v.set(i, rotations[k] * (v.at(i) + family[k].at(i)));
      reps[k] = rigidity_fit(gradient_grid(mesh, v), s.rigidity_p);
    });
    double worst = 0;
    for (std::size_t k = 0; k < reps.size(); ++k) {
      const RigidityReport& r = reps[k];
      t.row(cells, k, r.c_emp, r.c_infinite, r.m_emp, r.bmo_seminorm, r.dist_sup, r.lhs_p, r.rhs_p);
      infinite += r.c_infinite;
      worst = std::max(worst, r.c_emp);
    }
    levels.push_back({{"refinement", cells}, {"c_emp_max", json_number(worst)}});
  }
  Json meas = Json::object();
  meas["rigidity.c_infinite_count"] = measurement(static_cast<double>(infinite), 0, infinite == 0);
  out.verdict = verdict_of(meas);
  j["verdict"] = to_string(out.verdict);
  j["measurements"] = meas;
  j["p"] = s.rigidity_p;
  j["refinements"] = std::move(levels);
  j["provenance"] = {{"field_kind", "random rotation times (identity + smooth field)"},
                     {"amplitude", s.perturbation_amplitude},
                     {"fields", s.perturbations}};
  out.report = std::move(j);
  out.tables["c_emp_vs_refinement.csv"] = t.str();
  return out;
}

RunResult run_korn(const Scenario& s) {
  RunResult out;
  Json j = header(s);
  Csv t{"refinement", "k", "certified_lower", "residual", "iterations", "min_det"};
  Json levels = Json::array();
  std::vector<double> ks;
  const Mat f = s.korn_field;
  for (long cells : s.refinements) {
    const Mesh mesh = build_mesh(s.mesh, static_cast<int>(cells));
    const KornReport r = korn_constant(mesh, [&](const Vec&) { return f; });
    t.row(cells, r.k, r.certified_lower, r.residual, r.iterations, r.min_det);
    levels.push_back({{"refinement", cells}, {"k", json_number(r.k)}, {"certified_lower", json_number(r.certified_lower)}});
    ks.push_back(r.k);
  }
  Json meas = Json::object();
  const double k_min = ks.empty() ? 0 : *std::min_element(ks.begin(), ks.end());
  meas["korn.k_min"] = measurement(k_min, 0, k_min > 0);
  // the discrete infimum can only drop as the FE space grows
  bool monotone = true;
  for (std::size_t i = 1; i < ks.size(); ++i) monotone = monotone && ks[i] <= ks[i - 1] * (1 + 1e-9);
  meas["korn.non_increasing"] = measurement(ks.empty() ? 0 : ks.back(), ks.empty() ? 0 : ks.front(), monotone);
  out.verdict = verdict_of(meas);
  j["verdict"] = to_string(out.verdict);
  j["measurements"] = meas;
  j["field"] = to_json(f);
  j["refinements"] = std::move(levels);
  out.report = std::move(j);
  out.tables["korn_vs_refinement.csv"] = t.str();
  return out;
}

}  // namespace

RunResult run_scenario(const Scenario& s) {
  try {
    switch (s.pipeline) {
      case Pipeline::Solve: return run_solve(s);
      case Pipeline::CertifyBmoGate:
      case Pipeline::CertifySmallStrain:
      case Pipeline::CertifyStrainDiff: return run_certify(s);
      case Pipeline::DiagnosticsHarmonic: return run_harmonic(s);
      case Pipeline::DiagnosticsRigidity: return run_rigidity(s);
      case Pipeline::Korn: return run_korn(s);
    }
  } catch (const Error& e) {
    throw Error(e.code(), s.name + ": " + e.detail());
  }
  fail(ErrorCode::ConfigError, "unhandled pipeline");
}

Json error_report(const Scenario& s, const Error& e) {
  Json j = header(s);
  j["verdict"] = "error";
  j["measurements"] = Json::object();
  j["error"] = {{"code", to_string(e.code())}, {"message", e.detail()}};
  return j;
}

int exit_code(GateOutcome verdict) {
  switch (verdict) {
    case GateOutcome::Pass: return 0;
    case GateOutcome::Inapplicable: return 2;
    case GateOutcome::AssertionViolated: return 1;
  }
  return 1;
}

void write_artifacts(const std::filesystem::path& dir, const Json& report,
                     const std::map<std::string, std::string>& tables) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    if (!f) fail(ErrorCode::IoError, "cannot write " + (dir / name).string());
  };
  put("report.json", report.dump(2) + "\n");
  for (const auto& [name, text] : tables) put(name, text);
}

}  // namespace rigcert

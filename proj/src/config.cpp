#include "rigcert/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rigcert/error.hpp"
#include "rigcert/mesh.hpp"

namespace rigcert {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
std::optional<T> parse_token(const std::string& s) {
  T v{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

const std::vector<std::string> kKeys = {
    "name", "pipeline", "seed",
    "mesh.source", "mesh.generator", "mesh.file", "mesh.nx", "mesh.ny", "mesh.nz", "mesh.n",
    "mesh.lx", "mesh.ly", "mesh.lz", "mesh.dirichlet",
    "material.model", "material.lambda", "material.mu", "material.modulation",
    "loads.body", "loads.traction", "loads.placement", "loads.offset",
    "solver.tol", "solver.max_iterations", "solver.armijo", "solver.corner_det_check", "solver.initial",
    "certify.ball_radius", "certify.taylor_epsilon", "certify.strain_delta", "certify.taylor_samples",
    "certify.taylor_refine_starts", "certify.family_size", "certify.family_amplitude", "certify.equilibrium_tol",
    "certify.closeness_p", "certify.rigidity_p", "certify.delta_cap", "certify.restarts", "certify.restart_amplitude",
    "certify.constitutive_samples",
    "candidates.amplitudes", "candidates.modes",
    "harmonic.grid_sizes", "harmonic.fields", "harmonic.p", "harmonic.q",
    "rigidity.refinements", "rigidity.perturbations", "rigidity.amplitude", "rigidity.p",
    "korn.refinements", "korn.field",
};

Pipeline parse_pipeline(const std::string& s, const std::string& where) {
  for (Pipeline p : {Pipeline::Solve, Pipeline::CertifyBmoGate, Pipeline::CertifySmallStrain, Pipeline::CertifyStrainDiff,
                     Pipeline::DiagnosticsHarmonic, Pipeline::DiagnosticsRigidity, Pipeline::Korn})
    if (to_string(p) == s) return p;
  fail(ErrorCode::ConfigError, where + ": unknown pipeline '" + s + "'");
}

}  // namespace

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Solve: return "solve";
    case Pipeline::CertifyBmoGate: return "certify-bmo-gate";
    case Pipeline::CertifySmallStrain: return "certify-small-strain";
    case Pipeline::CertifyStrainDiff: return "certify-strain-diff";
    case Pipeline::DiagnosticsHarmonic: return "diagnostics-harmonic";
    case Pipeline::DiagnosticsRigidity: return "diagnostics-rigidity";
    case Pipeline::Korn: return "korn";
  }
  return "unknown";
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, source + ":" + std::to_string(no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) fail(ErrorCode::ConfigError, source + ":" + std::to_string(no) + ": empty key");
    if (value.empty()) fail(ErrorCode::ConfigError, source + ":" + std::to_string(no) + ": empty value for '" + key + "'");
    if (!c.entries_.try_emplace(key, Entry{value, no}).second)
      fail(ErrorCode::ConfigError, source + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read config " + path.string());
  Config c = parse(in, path.string());
  c.dir_ = path.parent_path();
  return c;
}

const Config::Entry& Config::entry(const std::string& key) const { return entries_.at(key); }

std::string Config::where(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return source_ + ": '" + key + "'";
  return source_ + ":" + std::to_string(it->second.line) + ": '" + key + "'";
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, e] : entries_)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorCode::ConfigError, source_ + ":" + std::to_string(e.line) + ": unknown key '" + key + "'");
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? entry(key).value : fallback;
}

double Config::number(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const auto v = parse_token<double>(entry(key).value);
  if (!v || !std::isfinite(*v)) fail(ErrorCode::ConfigError, where(key) + " must be a finite number");
  return *v;
}

long Config::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const auto v = parse_token<long>(entry(key).value);
  if (!v) fail(ErrorCode::ConfigError, where(key) + " must be an integer");
  return *v;
}

std::uint64_t Config::seed(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const auto v = parse_token<std::uint64_t>(entry(key).value);
  if (!v) fail(ErrorCode::ConfigError, where(key) + " must be an unsigned 64-bit integer");
  return *v;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entry(key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::ConfigError, where(key) + " must be true or false");
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& s : split_list(entry(key).value)) {
    const auto v = parse_token<double>(s);
    if (!v || !std::isfinite(*v)) fail(ErrorCode::ConfigError, where(key) + ": '" + s + "' is not a finite number");
    out.push_back(*v);
  }
  return out;
}

std::vector<long> Config::integers(const std::string& key, const std::vector<long>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<long> out;
  for (const std::string& s : split_list(entry(key).value)) {
    const auto v = parse_token<long>(s);
    if (!v) fail(ErrorCode::ConfigError, where(key) + ": '" + s + "' is not an integer");
    out.push_back(*v);
  }
  return out;
}

namespace {

Vec vector_key(const Config& c, const std::string& key, int n, double fill) {
  const std::vector<double> v = c.numbers(key, std::vector<double>(n, fill));
  if (static_cast<int>(v.size()) != n)
    fail(ErrorCode::ConfigError, c.where(key) + " needs " + std::to_string(n) + " components");
  return Eigen::Map<const Vec>(v.data(), n);
}

// Row-major n x n list.
Mat matrix_key(const Config& c, const std::string& key, int n, const Mat& fallback) {
  if (!c.has(key)) return fallback;
  const std::vector<double> v = c.numbers(key, {});
  if (static_cast<int>(v.size()) != n * n)
    fail(ErrorCode::ConfigError, c.where(key) + " needs " + std::to_string(n * n) + " entries (row major)");
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m;
}

Modulation parse_modulation(const Config& c, int n) {
  const std::string s = c.text("material.modulation", "none");
  if (s == "none") return {};
  if (s.rfind("radial(", 0) != 0 || s.back() != ')')
    fail(ErrorCode::ConfigError, c.where("material.modulation") + " must be none or radial(amplitude, center...)");
  std::vector<double> v;
  for (const std::string& t : split_list(s.substr(7, s.size() - 8))) {
    const auto x = parse_token<double>(t);
    if (!x) fail(ErrorCode::ConfigError, c.where("material.modulation") + ": '" + t + "' is not a number");
    v.push_back(*x);
  }
  if (static_cast<int>(v.size()) != n + 1)
    fail(ErrorCode::ConfigError, c.where("material.modulation") + " needs an amplitude and " + std::to_string(n) + " center coordinates");
  Modulation m;
  m.amplitude = v[0];
  m.center = Eigen::Map<const Vec>(v.data() + 1, n);
  return m;
}

void require(bool ok, const Config& c, const std::string& key, const std::string& what) {
  if (!ok) fail(ErrorCode::ConfigError, c.where(key) + " " + what);
}

}  // namespace

Scenario load_scenario(const Config& c, std::optional<std::uint64_t> seed_override) {
  c.require_known(kKeys);
  Scenario s;
  s.name = c.text("name", "scenario");
  if (!c.has("pipeline")) fail(ErrorCode::ConfigError, c.where("pipeline") + " is required");
  s.pipeline = parse_pipeline(c.text("pipeline", ""), c.where("pipeline"));
  s.seed = seed_override ? *seed_override : c.seed("seed", 1);

  MeshSpec& m = s.mesh;
  m.source = c.text("mesh.source", "generator");
  require(m.source == "generator" || m.source == "file", c, "mesh.source", "must be generator or file");
  m.generator = c.text("mesh.generator", "rectangle");
  require(m.generator == "rectangle" || m.generator == "l-shape" || m.generator == "annulus" || m.generator == "box", c,
          "mesh.generator", "must be rectangle, l-shape, annulus or box");
  if (m.source == "file") {
    require(c.has("mesh.file"), c, "mesh.file", "is required when mesh.source = file");
    m.file = c.directory() / c.text("mesh.file", "");
    require(std::filesystem::exists(m.file), c, "mesh.file", "names a missing file: " + m.file.string());
  }
  const long n_all = c.integer("mesh.n", 8);
  m.cells = {static_cast<int>(c.integer("mesh.nx", n_all)), static_cast<int>(c.integer("mesh.ny", n_all)),
             static_cast<int>(c.integer("mesh.nz", n_all))};
  for (int i = 0; i < 3; ++i) require(m.cells[i] >= 1 && m.cells[i] <= 4096, c, "mesh.n", "cell counts must lie in [1, 4096]");
  const double l_all = 1;
  m.size = {c.number("mesh.lx", l_all), c.number("mesh.ly", l_all), c.number("mesh.lz", l_all)};
  for (double l : m.size) require(l > 0, c, "mesh.lx", "side lengths must be positive");
  m.dirichlet = c.text("mesh.dirichlet", "all");
  if (m.generator == "l-shape") require(m.cells[0] % 2 == 0, c, "mesh.n", "must be even for the l-shape");
  if (m.generator == "annulus") require(m.cells[0] % 4 == 0, c, "mesh.n", "must be divisible by 4 for the annulus");
  int n = s.dim();
  if (m.source == "file") {
    std::ifstream in(m.file);
    n = read_mesh(in).dim();
  }

  s.material.model = c.text("material.model", "stvk");
  require(s.material.model == "stvk" || s.material.model == "neohookean" || s.material.model == "quadratic", c,
          "material.model", "must be stvk, neohookean or quadratic");
  s.material.lambda = c.number("material.lambda", 1);
  s.material.mu = c.number("material.mu", 1);
  require(s.material.mu > 0, c, "material.mu", "must be positive");
  require(s.material.lambda >= 0, c, "material.lambda", "must be non-negative");
  s.material.modulation = parse_modulation(c, n);

  s.loads.body = vector_key(c, "loads.body", n, 0);
  s.loads.traction = vector_key(c, "loads.traction", n, 0);
  s.loads.placement = matrix_key(c, "loads.placement", n, Mat::Identity(n, n));
  s.loads.offset = vector_key(c, "loads.offset", n, 0);
  require(s.loads.placement.determinant() > 0, c, "loads.placement", "must have positive determinant");

  s.solver.tol = c.number("solver.tol", 1e-10);
  s.solver.max_iterations = static_cast<int>(c.integer("solver.max_iterations", 50));
  s.solver.armijo = c.number("solver.armijo", 1e-4);
  s.solver.corner_det_check = c.flag("solver.corner_det_check", false);
  require(s.solver.tol > 0, c, "solver.tol", "must be positive");
  require(s.solver.max_iterations >= 0, c, "solver.max_iterations", "must be non-negative");
  s.initial = c.text("solver.initial", "placement");
  require(s.initial == "placement" || s.initial == "identity", c, "solver.initial", "must be placement or identity");

  CertifyOptions& o = s.certify;
  o.problem_id = s.name;
  o.ball_radius = c.number("certify.ball_radius", o.ball_radius);
  o.taylor_epsilon = c.number("certify.taylor_epsilon", o.taylor_epsilon);
  o.strain_delta = c.number("certify.strain_delta", o.strain_delta);
  o.taylor.samples = static_cast<std::size_t>(c.integer("certify.taylor_samples", static_cast<long>(o.taylor.samples)));
  o.taylor.refine_starts = static_cast<std::size_t>(c.integer("certify.taylor_refine_starts", static_cast<long>(o.taylor.refine_starts)));
  o.family_size = static_cast<std::size_t>(c.integer("certify.family_size", static_cast<long>(o.family_size)));
  o.family_amplitude = c.number("certify.family_amplitude", o.family_amplitude);
  o.equilibrium_tol = c.number("certify.equilibrium_tol", o.equilibrium_tol);
  o.closeness_p = c.number("certify.closeness_p", n + 1);
  o.rigidity_p = c.number("certify.rigidity_p", o.rigidity_p);
  o.delta_cap = c.number("certify.delta_cap", o.delta_cap);
  o.restarts = static_cast<std::size_t>(c.integer("certify.restarts", 0));
  o.restart_amplitude = c.number("certify.restart_amplitude", o.restart_amplitude);
  o.constitutive_samples = static_cast<std::size_t>(c.integer("certify.constitutive_samples", static_cast<long>(o.constitutive_samples)));
  o.taylor.seed = o.family_seed = o.restart_seed = o.constitutive_seed = s.seed;
  require(o.ball_radius > 0 && o.ball_radius < 1, c, "certify.ball_radius", "must lie in (0, 1)");
  require(o.taylor_epsilon > 0, c, "certify.taylor_epsilon", "must be positive");
  require(o.strain_delta > 0, c, "certify.strain_delta", "must be positive");
  require(o.taylor.samples > 0, c, "certify.taylor_samples", "must be positive");
  require(o.family_size > 0, c, "certify.family_size", "must be positive");
  require(o.closeness_p > n, c, "certify.closeness_p",
          "= " + c.text("certify.closeness_p", "") + " must exceed the dimension n = " + std::to_string(n) +
              " (boundary rotation closeness requires p > n)");
  require(o.rigidity_p > 1, c, "certify.rigidity_p", "must exceed 1");

  s.amplitudes = c.numbers("candidates.amplitudes", {1e-5, 1e-4, 1e-3});
  s.candidate_modes = static_cast<std::size_t>(c.integer("candidates.modes", 1));
  require(s.candidate_modes >= 1, c, "candidates.modes", "must be at least 1");

  s.grid_sizes = c.integers("harmonic.grid_sizes", {8, 16});
  s.fields = static_cast<std::size_t>(c.integer("harmonic.fields", 20));
  s.exponents_p = c.numbers("harmonic.p", {1.5, 2});
  s.exponents_q = c.numbers("harmonic.q", {3, 4});
  for (long g : s.grid_sizes) require(g >= 1 && g <= 64, c, "harmonic.grid_sizes", "entries must lie in [1, 64]");
  for (double p : s.exponents_p) require(p >= 1, c, "harmonic.p", "entries must be at least 1");
  for (double q : s.exponents_q)
    for (double p : s.exponents_p) require(q > p, c, "harmonic.q", "entries must exceed every p");

  s.refinements = c.integers(s.pipeline == Pipeline::Korn ? "korn.refinements" : "rigidity.refinements", {8, 16});
  for (long r : s.refinements) require(r >= 1 && r <= 256, c, "korn.refinements", "entries must lie in [1, 256]");
  s.perturbations = static_cast<std::size_t>(c.integer("rigidity.perturbations", 10));
  s.perturbation_amplitude = c.number("rigidity.amplitude", 0.05);
  s.rigidity_p = c.number("rigidity.p", 2);
  require(s.rigidity_p > 1, c, "rigidity.p", "must exceed 1");
  s.korn_field = matrix_key(c, "korn.field", n, Mat::Identity(n, n));
  require(s.korn_field.determinant() > 0, c, "korn.field", "must have positive determinant");
  return s;
}

Mesh build_mesh(const MeshSpec& spec, int cells_override) {
  if (spec.source == "file") {
    std::ifstream in(spec.file);
    if (!in) fail(ErrorCode::IoError, "cannot read mesh " + spec.file.string());
    return read_mesh(in);
  }
  auto cells = spec.cells;
  if (cells_override > 0) cells = {cells_override, cells_override, cells_override};
  const auto& l = spec.size;
  if (spec.generator == "rectangle") return rectangle_mesh(cells[0], cells[1], l[0], l[1], spec.dirichlet);
  if (spec.generator == "box") return box_mesh(cells[0], cells[1], cells[2], l[0], l[1], l[2], spec.dirichlet);
  if (spec.generator == "l-shape") return l_shape_mesh(cells[0], l[0], spec.dirichlet);
  if (spec.generator == "annulus") return square_annulus_mesh(cells[0], l[0], spec.dirichlet);
  fail(ErrorCode::ConfigError, "unknown mesh generator " + spec.generator);
}

std::unique_ptr<Material> build_material(const MaterialSpec& spec) {
  return make_material(spec.model, spec.lambda, spec.mu, spec.modulation);
}

LoadSet build_loads(const Mesh& mesh, const LoadSpec& spec) {
  if (spec.body.size() != mesh.dim()) fail(ErrorCode::ConfigError, "load vectors do not match the mesh dimension");
  const Vec b = spec.body, s = spec.traction, c = spec.offset;
  const Mat f = spec.placement;
  return make_loads(
      mesh, [b](const Vec&) { return b; }, [s](const Vec&, const Vec&) { return s; },
      [f, c](const Vec& x) { return Vec(f * x + c); });
}

FeField placement_field(const Mesh& mesh, const LoadSpec& spec) {
  return interpolate(mesh, [&](const Vec& x) { return Vec(spec.placement * x + spec.offset); });
}

}  // namespace rigcert

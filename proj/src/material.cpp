#include "rigcert/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rigcert/error.hpp"
#include "rigcert/random.hpp"

namespace rigcert {

MaterialPoint at_point(const Vec& x) { return MaterialPoint{x, -1, -1}; }

double Modulation::factor(const Vec& x) const {
  if (amplitude == 0) return 1;
  Vec c = center.size() == x.size() ? center : Vec(Vec::Zero(x.size()));
  return 1 + amplitude * (x - c).squaredNorm();
}

namespace {

double checked_det(const Mat& f) {
  const double j = f.determinant();
  if (!(j > 0)) fail(ErrorCode::OutsideDomain, "det F = " + std::to_string(j) + " is not positive");
  return j;
}

int dim_of(const Mat& f) { return static_cast<int>(f.rows()); }

Mat unit(int n, int c) {
  Mat e = Mat::Zero(n, n);
  e(c % n, c / n) = 1;
  return e;
}

// Orthonormal basis of symmetric n x n matrices.
std::vector<Mat> symmetric_basis(int n) {
  std::vector<Mat> basis;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Mat b = Mat::Zero(n, n);
      if (i == j) {
        b(i, i) = 1;
      } else {
        b(i, j) = b(j, i) = std::sqrt(0.5);
      }
      basis.push_back(b);
    }
  return basis;
}

std::vector<Mat> skew_basis(int n) {
  std::vector<Mat> basis;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat b = Mat::Zero(n, n);
      b(i, j) = std::sqrt(0.5);
      b(j, i) = -std::sqrt(0.5);
      basis.push_back(b);
    }
  return basis;
}

Mat sqrt_spd(const Mat& c) {
  const SymEigen e = sym_eigen(c);
  Vec s(e.values.size());
  for (int i = 0; i < s.size(); ++i) s(i) = std::sqrt(std::max(e.values(i), 0.0));
  return e.vectors * s.asDiagonal() * e.vectors.transpose();
}

}  // namespace

Eigen::MatrixXd Material::elasticity_matrix(const MaterialPoint& p, const Mat& f) const {
  const int n = dim_of(f);
  Eigen::MatrixXd a(n * n, n * n);
  for (int c = 0; c < n * n; ++c) {
    const Mat col = elasticity_apply(p, f, unit(n, c));
    for (int r = 0; r < n * n; ++r) a(r, c) = col(r % n, r / n);
  }
  return a;
}

double Material::sigma(const MaterialPoint& p, const Mat& c) const { return energy(p, sqrt_spd(c)); }

Mat Material::sigma_gradient(const MaterialPoint& p, const Mat& c) const {
  const int n = dim_of(c);
  const double h = fd_step(c);
  Mat g = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Mat b = Mat::Zero(n, n);
      b(i, j) += 1;
      if (i != j) b(j, i) += 1;
      const double d = (sigma(p, c + h * b) - sigma(p, c - h * b)) / (2 * h);
      g(i, j) = g(j, i) = i == j ? d : d / 2;
    }
  return g;
}

Mat Material::sigma_hessian_apply(const MaterialPoint& p, const Mat& c, const Mat& b) const {
  const double h = fd_step(c) * 1e2;
  return (sigma_gradient(p, c + h * b) - sigma_gradient(p, c - h * b)) / (2 * h);
}

// --- St. Venant-Kirchhoff ---------------------------------------------------

StVenantKirchhoff::StVenantKirchhoff(double lambda, double mu, Modulation mod)
    : lambda_(lambda), mu_(mu), mod_(std::move(mod)) {
  if (!(mu > 0) || !(lambda > 0)) fail(ErrorCode::ConfigError, "StVK needs lambda > 0 and mu > 0");
}

double StVenantKirchhoff::energy(const MaterialPoint& p, const Mat& f) const {
  checked_det(f);
  const Mat e = strain(f);
  const double tr = e.trace();
  return 0.5 * lambda_at(p.x) * tr * tr + mu_at(p.x) * ddot(e, e);
}

Mat StVenantKirchhoff::stress(const MaterialPoint& p, const Mat& f) const {
  checked_det(f);
  const int n = dim_of(f);
  const Mat e = strain(f);
  return f * (lambda_at(p.x) * e.trace() * identity(n) + 2 * mu_at(p.x) * e);
}

Mat StVenantKirchhoff::elasticity_apply(const MaterialPoint& p, const Mat& f, const Mat& h) const {
  checked_det(f);
  const int n = dim_of(f);
  const double l = lambda_at(p.x), m = mu_at(p.x);
  const Mat e = strain(f);
  const Mat de = sym(f.transpose() * h);
  return h * (l * e.trace() * identity(n) + 2 * m * e) + f * (l * de.trace() * identity(n) + 2 * m * de);
}

double StVenantKirchhoff::sigma(const MaterialPoint& p, const Mat& c) const {
  const Mat e = 0.5 * (c - identity(dim_of(c)));
  const double tr = e.trace();
  return 0.5 * lambda_at(p.x) * tr * tr + mu_at(p.x) * ddot(e, e);
}

Mat StVenantKirchhoff::sigma_gradient(const MaterialPoint& p, const Mat& c) const {
  const int n = dim_of(c);
  const Mat e = 0.5 * (c - identity(n));
  return 0.5 * (lambda_at(p.x) * e.trace() * identity(n) + 2 * mu_at(p.x) * e);
}

Mat StVenantKirchhoff::sigma_hessian_apply(const MaterialPoint& p, const Mat& c, const Mat& b) const {
  return 0.25 * (lambda_at(p.x) * b.trace() * identity(dim_of(c)) + 2 * mu_at(p.x) * b);
}

// --- compressible neo-Hookean -------------------------------------------------

NeoHookean::NeoHookean(double lambda, double mu, Modulation mod) : lambda_(lambda), mu_(mu), mod_(std::move(mod)) {
  if (!(mu > 0) || !(lambda > 0)) fail(ErrorCode::ConfigError, "neo-Hookean needs lambda > 0 and mu > 0");
}

double NeoHookean::energy(const MaterialPoint& p, const Mat& f) const {
  const double lj = std::log(checked_det(f));
  const double m = mu_at(p.x);
  return 0.5 * m * (ddot(f, f) - dim_of(f)) - m * lj + 0.5 * lambda_at(p.x) * lj * lj;
}

Mat NeoHookean::stress(const MaterialPoint& p, const Mat& f) const {
  const double lj = std::log(checked_det(f));
  const double m = mu_at(p.x);
  const Mat fit = f.inverse().transpose();
  return m * f + (lambda_at(p.x) * lj - m) * fit;
}

Mat NeoHookean::elasticity_apply(const MaterialPoint& p, const Mat& f, const Mat& h) const {
  const double lj = std::log(checked_det(f));
  const double m = mu_at(p.x), l = lambda_at(p.x);
  const Mat fi = f.inverse();
  const Mat fit = fi.transpose();
  return m * h + (m - l * lj) * fit * h.transpose() * fit + l * (fi * h).trace() * fit;
}

double NeoHookean::sigma(const MaterialPoint& p, const Mat& c) const {
  const double ldc = std::log(c.determinant());
  const double m = mu_at(p.x);
  return 0.5 * m * (c.trace() - dim_of(c)) - 0.5 * m * ldc + 0.125 * lambda_at(p.x) * ldc * ldc;
}

Mat NeoHookean::sigma_gradient(const MaterialPoint& p, const Mat& c) const {
  const double ldc = std::log(c.determinant());
  const double m = mu_at(p.x);
  const Mat ci = c.inverse();
  return 0.5 * m * identity(dim_of(c)) + (0.25 * lambda_at(p.x) * ldc - 0.5 * m) * ci;
}

Mat NeoHookean::sigma_hessian_apply(const MaterialPoint& p, const Mat& c, const Mat& b) const {
  const double ldc = std::log(c.determinant());
  const double m = mu_at(p.x), l = lambda_at(p.x);
  const Mat ci = c.inverse();
  return (0.5 * m - 0.25 * l * ldc) * ci * b * ci + 0.25 * l * (ci * b).trace() * ci;
}

// --- quadratic toy -------------------------------------------------------------

double QuadraticToy::energy(const MaterialPoint&, const Mat& f) const {
  checked_det(f);
  return 0.5 * mu_ * (f - identity(dim_of(f))).squaredNorm();
}

Mat QuadraticToy::stress(const MaterialPoint&, const Mat& f) const {
  checked_det(f);
  return mu_ * (f - identity(dim_of(f)));
}

Mat QuadraticToy::elasticity_apply(const MaterialPoint&, const Mat& f, const Mat& h) const {
  checked_det(f);
  return mu_ * h;
}

// --- free functions --------------------------------------------------------------

double energy_density(const Material& m, const Vec& x, const Mat& f) { return m.energy(at_point(x), f); }
Mat stress(const Material& m, const Vec& x, const Mat& f) { return m.stress(at_point(x), f); }
Mat elasticity_apply(const Material& m, const Vec& x, const Mat& f, const Mat& h) {
  return m.elasticity_apply(at_point(x), f, h);
}

double fd_step(const Mat& f) { return 1e-6 * (1 + fnorm(f)); }

Mat fd_stress(const Material& m, const MaterialPoint& p, const Mat& f) {
  const int n = dim_of(f);
  const double h = fd_step(f);
  Mat s(n, n);
  for (int c = 0; c < n * n; ++c) {
    const Mat e = unit(n, c);
    s(c % n, c / n) = (m.energy(p, f + h * e) - m.energy(p, f - h * e)) / (2 * h);
  }
  return s;
}

Mat fd_elasticity_apply(const Material& m, const MaterialPoint& p, const Mat& f, const Mat& h) {
  const double t = fd_step(f);
  return (m.stress(p, f + t * h) - m.stress(p, f - t * h)) / (2 * t);
}

namespace {

double rel(const Mat& a, const Mat& b) { return fnorm(a - b) / std::max(1.0, fnorm(b)); }

[[noreturn]] void violated(const std::string& what, const Mat& f) {
  std::ostringstream s;
  s << what << " at F = [" << f.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "; ")) << "]";
  fail(ErrorCode::CheckFailed, s.str());
}

// Smallest value of B:A(I)[B] / |B + B^T|^2 with skew parts minimized out.
double identity_coercivity(const Material& m, const MaterialPoint& p, int n) {
  const Eigen::MatrixXd a = m.elasticity_matrix(p, identity(n));
  auto vec = [n](const Mat& b) {
    Eigen::VectorXd v(n * n);
    for (int c = 0; c < n * n; ++c) v(c) = b(c % n, c / n);
    return v;
  };
  const auto sb = symmetric_basis(n), wb = skew_basis(n);
  Eigen::MatrixXd ps(n * n, sb.size()), pw(n * n, wb.size());
  for (std::size_t i = 0; i < sb.size(); ++i) ps.col(i) = vec(sb[i]);
  for (std::size_t i = 0; i < wb.size(); ++i) pw.col(i) = vec(wb[i]);
  const Eigen::MatrixXd as = 0.5 * (a + a.transpose());
  Eigen::MatrixXd mss = ps.transpose() * as * ps;
  const Eigen::MatrixXd msw = ps.transpose() * as * pw;
  const Eigen::MatrixXd mww = pw.transpose() * as * pw;
  const double scale = std::max(1.0, as.norm());
  if (mww.norm() > 1e-12 * scale || msw.norm() > 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ew(mww);
    if (ew.eigenvalues().minCoeff() <= 1e-12 * scale) return -std::numeric_limits<double>::infinity();
    mss -= msw * mww.inverse() * msw.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mss);
  // |B + B^T|^2 = 4 |B|^2 for symmetric B
  return es.eigenvalues().minCoeff() / 4;
}

double sigma_identity_coercivity(const Material& m, const MaterialPoint& p, int n) {
  const auto sb = symmetric_basis(n);
  Eigen::MatrixXd q(sb.size(), sb.size());
  for (std::size_t i = 0; i < sb.size(); ++i) {
    const Mat d = m.sigma_hessian_apply(p, identity(n), sb[i]);
    for (std::size_t j = 0; j < sb.size(); ++j) q(j, i) = ddot(sb[j], d);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace

ConstitutiveReport check_constitutive(const Material& m, int n, std::size_t samples, std::uint64_t seed,
                                      const std::vector<Vec>& points) {
  if (samples < 1) fail(ErrorCode::ConfigError, "check_constitutive needs at least one sample");
  Rng rng(seed);
  ConstitutiveReport r;
  r.samples = samples;
  r.sigma_closed_form = m.has_sigma_form();
  const double sv_lo = std::pow(0.3, 1.0 / n), sv_hi = std::pow(3.0, 1.0 / n);
  const double sigma_tol = m.has_sigma_form() ? 1e-10 : 1e-5;
  for (std::size_t s = 0; s < samples; ++s) {
    const MaterialPoint p = at_point(points.empty() ? Vec(Vec::Zero(n)) : points[s % points.size()]);
    const Mat f = random_with_singular_values(n, sv_lo, sv_hi, rng);
    const Mat q = random_rotation(n, rng);
    const Mat h = random_unit_matrix(n, rng);
    const Mat k = random_unit_matrix(n, rng);

    const double w = m.energy(p, f);
    const double fi = std::abs(m.energy(p, q * f) - w) / (1 + std::abs(w));
    r.frame_indifference_error = std::max(r.frame_indifference_error, fi);
    if (fi > 1e-12) violated("frame indifference", f);

    const Mat sf = m.stress(p, f);
    r.stress_fd_error = std::max(r.stress_fd_error, rel(sf, fd_stress(m, p, f)));
    if (r.stress_fd_error > 1e-6) violated("stress vs finite differences", f);

    const Mat ah = m.elasticity_apply(p, f, h);
    r.elasticity_fd_error = std::max(r.elasticity_fd_error, rel(ah, fd_elasticity_apply(m, p, f, h)));
    if (r.elasticity_fd_error > 1e-5) violated("elasticity vs finite differences", f);

    const double symm = std::abs(ddot(k, ah) - ddot(h, m.elasticity_apply(p, f, k))) / std::max(1.0, fnorm(ah));
    r.elasticity_symmetry_error = std::max(r.elasticity_symmetry_error, symm);
    if (symm > 1e-10) violated("elasticity symmetry", f);

    const Mat c = f.transpose() * f;
    const Mat ds = m.sigma_gradient(p, c);
    r.sigma_stress_error = std::max(r.sigma_stress_error, rel(2 * f * ds, sf));
    if (r.sigma_stress_error > sigma_tol) violated("stress sigma form", f);
    const Mat b = h.transpose() * f + f.transpose() * h;
    const double split = ddot(b, m.sigma_hessian_apply(p, c, b)) + 2 * ddot(ds, h.transpose() * h);
    const double direct = ddot(h, ah);
    const double se = std::abs(split - direct) / std::max(1.0, std::abs(direct));
    r.sigma_elasticity_error = std::max(r.sigma_elasticity_error, se);
    if (se > sigma_tol) violated("elasticity sigma split", f);
  }
  const MaterialPoint p0 = at_point(points.empty() ? Vec(Vec::Zero(n)) : points.front());
  r.stress_at_identity = fnorm(m.stress(p0, identity(n)));
  if (r.stress_at_identity > 1e-12) violated("stress at identity", identity(n));
  r.coercivity_at_identity = std::numeric_limits<double>::infinity();
  r.sigma_coercivity_at_identity = std::numeric_limits<double>::infinity();
  const std::size_t npoints = std::max<std::size_t>(1, points.size());
  for (std::size_t i = 0; i < npoints; ++i) {
    const MaterialPoint p = at_point(points.empty() ? Vec(Vec::Zero(n)) : points[i]);
    r.coercivity_at_identity = std::min(r.coercivity_at_identity, identity_coercivity(m, p, n));
    r.sigma_coercivity_at_identity = std::min(r.sigma_coercivity_at_identity, sigma_identity_coercivity(m, p, n));
  }
  if (!(r.coercivity_at_identity > 0)) violated("positive definiteness at identity", identity(n));
  if (!(r.sigma_coercivity_at_identity > 0)) violated("sigma positive definiteness at identity", identity(n));
  return r;
}

// --- Taylor constants ----------------------------------------------------------------

namespace {
constexpr double kRemainderFloor = 0.02;
}

double taylor_remainder_quotient(const Material& m, const MaterialPoint& p, const Mat& f, const Mat& g) {
  const Mat h = g - f;
  const double nh = fnorm(h);
  if (nh < kRemainderFloor) {
    // The direct quotient loses all digits to cancellation here; use its
    // limit -D3W(F)[K,K,K]/6 along K = H/|H|.
    const Mat k = h / nh;
    const double t = 1e-4;
    const double d3 = (ddot(k, m.elasticity_apply(p, f + t * k, k)) - ddot(k, m.elasticity_apply(p, f - t * k, k))) / (2 * t);
    return -d3 / 6;
  }
  const double num = m.energy(p, f) - m.energy(p, g) + ddot(m.stress(p, f), h) + 0.5 * ddot(h, m.elasticity_apply(p, f, h));
  return num / (nh * nh * nh);
}

double elasticity_lipschitz_quotient(const Material& m, const MaterialPoint& p, const Mat& f, const Mat& g) {
  const Eigen::MatrixXd d = m.elasticity_matrix(p, f) - m.elasticity_matrix(p, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (d + d.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / fnorm(g - f);
}

namespace {

struct Pair {
  std::size_t point = 0;
  Mat f, g;
  double value = -std::numeric_limits<double>::infinity();
};

bool within(const Mat& a, double radius) { return a.determinant() > 0 && dist_to_rotations(a) <= radius; }

template <class Quotient>
Pair refine(Pair best, double delta, double outer, const TaylorOptions& opt, Rng& rng, Quotient&& quotient) {
  const int n = static_cast<int>(best.f.rows());
  double step = 0.25 * outer;
  std::size_t misses = 0;
  for (std::size_t it = 0; it < opt.refine_steps; ++it) {
    Pair trial = best;
    trial.f += step * uniform(rng) * random_unit_matrix(n, rng);
    trial.g += step * uniform(rng) * random_unit_matrix(n, rng);
    if (!within(trial.f, delta) || !within(trial.g, outer) || fnorm(trial.g - trial.f) < 1e-4) {
      if (++misses > 8) step *= 0.5, misses = 0;
      continue;
    }
    trial.value = quotient(trial);
    if (trial.value > best.value) {
      best = trial;
      misses = 0;
    } else if (++misses > 8) {
      step *= 0.5;
      misses = 0;
    }
  }
  return best;
}

}  // namespace

TaylorConstants taylor_constants(const Material& m, int n, double delta, double epsilon, const TaylorOptions& opt) {
  if (!(delta > 0) || !(epsilon > 0)) fail(ErrorCode::ConfigError, "Taylor set radii must be positive");
  if (!(delta + epsilon < 1)) fail(ErrorCode::SetEscapesDomain, "delta + epsilon must stay below 1 to keep det F > 0");
  std::vector<MaterialPoint> points = opt.points;
  if (points.empty()) points.push_back(at_point(Vec::Zero(n)));
  const double outer = delta + epsilon;
  Rng rng(opt.seed);

  auto sample_in = [&](double radius) {
    const double r = uniform(rng) < 0.5 ? radius : radius * std::sqrt(uniform(rng));
    return random_at_rotation_distance(n, r, rng);
  };
  auto quot_c = [&](const Pair& s) { return taylor_remainder_quotient(m, points[s.point], s.f, s.g); };
  auto quot_ch = [&](const Pair& s) { return elasticity_lipschitz_quotient(m, points[s.point], s.f, s.g); };

  const std::size_t keep = std::max<std::size_t>(1, opt.refine_starts);
  std::vector<Pair> top_c, top_ch;
  auto offer = [keep](std::vector<Pair>& top, const Pair& s) {
    if (top.size() < keep) {
      top.push_back(s);
    } else {
      auto worst = std::min_element(top.begin(), top.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });
      if (s.value > worst->value) *worst = s;
    }
  };

  for (std::size_t s = 0; s < opt.samples; ++s) {
    Pair pr;
    pr.point = points.size() == 1 ? 0 : static_cast<std::size_t>(rng() % points.size());
    pr.f = sample_in(delta);
    if (s % 2 == 0) {
      pr.g = sample_in(outer);
    } else {
      // local pair: G a short step from F, kept inside the fattened ball
      for (int attempt = 0;; ++attempt) {
        const double t = outer * std::pow(uniform(rng), 2) + 1e-3;
        pr.g = pr.f + t * random_unit_matrix(n, rng);
        if (within(pr.g, outer) || attempt > 20) break;
      }
      if (!within(pr.g, outer)) pr.g = sample_in(outer);
    }
    if (fnorm(pr.g - pr.f) < 1e-4) continue;
    Pair a = pr, b = pr;
    a.value = quot_c(a);
    b.value = quot_ch(b);
    offer(top_c, a);
    offer(top_ch, b);
  }

  TaylorConstants out;
  out.delta = delta;
  out.epsilon = epsilon;
  out.samples = opt.samples;
  out.seed = opt.seed;
  for (const Pair& s : top_c) out.c = std::max(out.c, refine(s, delta, outer, opt, rng, quot_c).value);
  for (const Pair& s : top_ch) out.c_hat = std::max(out.c_hat, refine(s, delta, outer, opt, rng, quot_ch).value);
  out.c = std::max(out.c, 0.0);
  out.c_hat = std::max(out.c_hat, 0.0);
  return out;
}

std::unique_ptr<Material> make_material(const std::string& model, double lambda, double mu, Modulation mod) {
  if (model == "stvk") return std::make_unique<StVenantKirchhoff>(lambda, mu, std::move(mod));
  if (model == "neohookean") return std::make_unique<NeoHookean>(lambda, mu, std::move(mod));
  if (model == "quadratic") return std::make_unique<QuadraticToy>(mu);
  fail(ErrorCode::ConfigError, "unknown material model '" + model + "'");
}

}  // namespace rigcert

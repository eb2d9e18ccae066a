#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rigcert/tensor_core.hpp"

namespace rigcert {

// Evaluation point. Finite-element assembly also passes the element and
// quadrature index so that materials defined per quadrature point (the
// push-forward of a material) can skip point location.
struct MaterialPoint {
  Vec x;
  long element = -1;
  int qp = -1;
};

MaterialPoint at_point(const Vec& x);

// Continuous multiplicative modulation of the Lame parameters,
// factor(x) = 1 + amplitude |x - center|^2.
struct Modulation {
  double amplitude = 0;
  Vec center;
  double factor(const Vec& x) const;
  bool active() const { return amplitude != 0; }
};

class Material {
 public:
  virtual ~Material() = default;

  virtual std::string name() const = 0;
  virtual double energy(const MaterialPoint& p, const Mat& f) const = 0;
  virtual Mat stress(const MaterialPoint& p, const Mat& f) const = 0;
  virtual Mat elasticity_apply(const MaterialPoint& p, const Mat& f, const Mat& h) const = 0;

  // n^2 x n^2 matrix of the elasticity tensor acting on column-major vec(H).
  virtual Eigen::MatrixXd elasticity_matrix(const MaterialPoint& p, const Mat& f) const;

  // Materials of the form W(F) = sigma(F^T F) expose Dsigma and D2sigma.
  virtual bool has_sigma_form() const { return false; }
  virtual double sigma(const MaterialPoint& p, const Mat& c) const;
  virtual Mat sigma_gradient(const MaterialPoint& p, const Mat& c) const;
  virtual Mat sigma_hessian_apply(const MaterialPoint& p, const Mat& c, const Mat& b) const;
};

class StVenantKirchhoff final : public Material {
 public:
  StVenantKirchhoff(double lambda, double mu, Modulation mod = {});
  std::string name() const override { return "stvk"; }
  double energy(const MaterialPoint& p, const Mat& f) const override;
  Mat stress(const MaterialPoint& p, const Mat& f) const override;
  Mat elasticity_apply(const MaterialPoint& p, const Mat& f, const Mat& h) const override;
  bool has_sigma_form() const override { return true; }
  double sigma(const MaterialPoint& p, const Mat& c) const override;
  Mat sigma_gradient(const MaterialPoint& p, const Mat& c) const override;
  Mat sigma_hessian_apply(const MaterialPoint& p, const Mat& c, const Mat& b) const override;

 private:
  double lambda_at(const Vec& x) const { return lambda_ * mod_.factor(x); }
  double mu_at(const Vec& x) const { return mu_ * mod_.factor(x); }
  double lambda_, mu_;
  Modulation mod_;
};

class NeoHookean final : public Material {
 public:
  NeoHookean(double lambda, double mu, Modulation mod = {});
  std::string name() const override { return "neohookean"; }
  double energy(const MaterialPoint& p, const Mat& f) const override;
  Mat stress(const MaterialPoint& p, const Mat& f) const override;
  Mat elasticity_apply(const MaterialPoint& p, const Mat& f, const Mat& h) const override;
  bool has_sigma_form() const override { return true; }
  double sigma(const MaterialPoint& p, const Mat& c) const override;
  Mat sigma_gradient(const MaterialPoint& p, const Mat& c) const override;
  Mat sigma_hessian_apply(const MaterialPoint& p, const Mat& c, const Mat& b) const override;

 private:
  double lambda_at(const Vec& x) const { return lambda_ * mod_.factor(x); }
  double mu_at(const Vec& x) const { return mu_ * mod_.factor(x); }
  double lambda_, mu_;
  Modulation mod_;
};

// (mu/2)|F - I|^2. Not frame indifferent; its third derivative vanishes.
class QuadraticToy final : public Material {
 public:
  explicit QuadraticToy(double mu = 1) : mu_(mu) {}
  std::string name() const override { return "quadratic"; }
  double energy(const MaterialPoint& p, const Mat& f) const override;
  Mat stress(const MaterialPoint& p, const Mat& f) const override;
  Mat elasticity_apply(const MaterialPoint& p, const Mat& f, const Mat& h) const override;

 private:
  double mu_;
};

double energy_density(const Material& m, const Vec& x, const Mat& f);
Mat stress(const Material& m, const Vec& x, const Mat& f);
Mat elasticity_apply(const Material& m, const Vec& x, const Mat& f, const Mat& h);

// Central difference step used throughout: 1e-6 (1 + |F|).
double fd_step(const Mat& f);
Mat fd_stress(const Material& m, const MaterialPoint& p, const Mat& f);
Mat fd_elasticity_apply(const Material& m, const MaterialPoint& p, const Mat& f, const Mat& h);

struct ConstitutiveReport {
  std::size_t samples = 0;
  double frame_indifference_error = 0;   // max |W(QF) - W(F)| / (1 + |W(F)|)
  double stress_fd_error = 0;            // max relative |S - S_fd|
  double elasticity_fd_error = 0;        // max relative |A[H] - A_fd[H]|
  double elasticity_symmetry_error = 0;  // max |K:A[H] - H:A[K]|
  double sigma_stress_error = 0;         // max relative |S - 2F Dsigma(C)|
  double sigma_elasticity_error = 0;     // max relative error of the sigma split of H:A[H]
  bool sigma_closed_form = false;
  double stress_at_identity = 0;         // |S(I)|
  double coercivity_at_identity = 0;     // best c in H:A(I)[H] >= c |H + H^T|^2
  double sigma_coercivity_at_identity = 0;  // best c in B:D2sigma(I)[B] >= c |B|^2
};

// Throws CheckFailed naming the first violated property; otherwise returns
// the measured errors and constants.
ConstitutiveReport check_constitutive(const Material& m, int n, std::size_t samples, std::uint64_t seed,
                                      const std::vector<Vec>& points = {});

struct TaylorOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::size_t refine_starts = 16;
  std::size_t refine_steps = 200;
  std::vector<MaterialPoint> points;  // sampled x; defaults to the origin
};

struct TaylorConstants {
  double c = 0;
  double c_hat = 0;
  double delta = 0;    // radius of the rotation-distance ball B
  double epsilon = 0;  // fattening radius
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// Empirical sup of the cubic Taylor remainder quotient and of the
// second-derivative Lipschitz quotient over F in closure(B), G in the
// epsilon-fattening of B, where B = {dist(F, SO(n)) < delta}.
TaylorConstants taylor_constants(const Material& m, int n, double delta, double epsilon, const TaylorOptions& opt = {});

// Remainder quotient [W(F) - W(G) + S(F):H + H:A(F)[H]/2] / |H|^3, H = G - F.
double taylor_remainder_quotient(const Material& m, const MaterialPoint& p, const Mat& f, const Mat& g);
// sup over unit K of [K:A(F)[K] - K:A(G)[K]] / |G - F|, exact via the
// largest eigenvalue of the difference of elasticity matrices.
double elasticity_lipschitz_quotient(const Material& m, const MaterialPoint& p, const Mat& f, const Mat& g);

std::unique_ptr<Material> make_material(const std::string& model, double lambda, double mu, Modulation mod = {});

}  // namespace rigcert

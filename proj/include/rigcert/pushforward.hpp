#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rigcert/certify.hpp"
#include "rigcert/fem.hpp"
#include "rigcert/material.hpp"

namespace rigcert {

// How F = grad u_e enters the pushed-forward material and loads.
//   Exact: the elementwise gradient at each quadrature point. With Q1
//     isoparametric node transport the deformed quadrature is the image of
//     the reference quadrature, so every change-of-variables identity holds
//     to roundoff.
//   Recovered: the continuous field obtained by averaging element gradients
//     at the nodes and interpolating. This is what a pushforward built from
//     a smooth gradient field sees; its discrepancy is a discretization
//     error that vanishes under refinement.
enum class Transport { Exact, Recovered };
std::string_view to_string(Transport t);

struct DeformedConfig {
  Mesh mesh;                      // nodes u_e(x_i), same connectivity and boundary split
  std::vector<Vec> forward;       // node images
  std::vector<Vec> reference_x;   // reference position of each quadrature point (element-major)
  std::vector<Mat> f;             // F per quadrature point
  std::vector<Mat> f_inv;         // F^-1 per quadrature point
  std::vector<double> det_f;      // det F per quadrature point
  std::vector<Mat> facet_f;       // F per traction-facet quadrature point
  Transport transport = Transport::Exact;
  double min_det = 0;
  double inverse_residual = 0;    // max |F^-1 F - I|
};

// Throws DeterminantViolation if det grad u_e <= 0 at a quadrature point and
// NotInjective if two node images coincide within 1e-12 or an image element
// is inverted at a corner.
DeformedConfig deform_configuration(const Mesh& mesh, const FeField& u_e, Transport transport = Transport::Exact);

// Node transport of a reference field onto the deformed mesh: the nodal
// values are kept, so the field is v o u_e^-1 on the image.
FeField transport_field(const DeformedConfig& cfg, const FeField& v);

// W_u(y, G) = W(x, G F) / det F, S_u = S(x, G F) F^T / det F,
// A_u[H] = A(x, G F)[H F] F^T / det F, with y the image of x. The point is
// resolved through the (element, qp) pair of the evaluation point, falling
// back to the nearest deformed quadrature point.
class PushedMaterial final : public Material {
 public:
  PushedMaterial(const Material& base, const DeformedConfig& cfg);
  std::string name() const override { return "pushforward(" + base_.name() + ")"; }
  double energy(const MaterialPoint& p, const Mat& g) const override;
  Mat stress(const MaterialPoint& p, const Mat& g) const override;
  Mat elasticity_apply(const MaterialPoint& p, const Mat& g, const Mat& h) const override;

 private:
  std::size_t locate(const MaterialPoint& p) const;
  MaterialPoint reference_point(std::size_t k) const;

  const Material& base_;
  int qp_per_element_;
  std::vector<Vec> deformed_x_, reference_x_;
  std::vector<Mat> f_;
  std::vector<double> det_f_;
};

PushedMaterial pushforward_material(const Material& m, const DeformedConfig& cfg);

// b_u = b / det F; s_u = s / (|F^-T n| det F) at each traction-facet point.
// Dirichlet data are unchanged. Throws DegenerateNormal if |F^-T n| < 1e-12.
LoadSet pushforward_loads(const Mesh& mesh, const LoadSet& loads, const DeformedConfig& cfg);

struct CovLine {
  double lhs = 0;  // reference integral
  double rhs = 0;  // deformed integral
  // |lhs - rhs| over the larger integral of |integrand|; 0 when that
  // integral is below 1e-12 of the largest line
  double relative = 0;
};

struct CovReport {
  Transport transport = Transport::Exact;
  // energy, stress power, elasticity form, body work, traction work
  std::array<CovLine, 5> lines;
  double max_relative = 0;
};

std::array<std::string_view, 5> cov_line_names();

// Both sides of the five change-of-variables identities for v, w given on
// the reference mesh; the deformed sides use the transported fields.
CovReport verify_cov_identities(const Material& m, const Mesh& mesh, const LoadSet& loads, const FeField& u_e,
                                const FeField& v, const FeField& w, Transport transport = Transport::Exact);

struct StrainDistPoint {
  double d = 0;            // dist(G F^-1, SO(n))
  double strain_diff = 0;  // |G^T G - F^T F|
  bool lower_ok = true;    // upsilon^2 d^2 <= sqrt(n) |G^T G - F^T F|
  bool upper_ok = true;    // sqrt(n) |G^T G - F^T F| <= Upsilon^2 d sqrt(n) (d + 2 sqrt(n))
  bool linear_ok = true;   // upsilon^2 d <= |G^T G - F^T F|
};

struct StrainDistReport {
  double upsilon_max = 0;  // sup |F|
  double upsilon_min = 0;  // inf |F^-1|^-1
  double d_sup = 0;
  double strain_diff_sup = 0;
  std::size_t violations = 0;
  std::vector<StrainDistPoint> points;  // element-major quadrature order
};

// Throws DeterminantViolation if det grad u_e or det grad v <= 0 somewhere.
StrainDistReport strain_diff_to_dist(const Mesh& mesh, const FeField& u_e, const FeField& v);

// Strain-difference uniqueness certificate: candidates with
// |grad v^T grad v - grad u_e^T grad u_e|_inf < opt.strain_delta are moved to
// the deformed configuration and run through the rigidity, BMO and energy
// gates there with the pushed-forward material. Throws HypothesisUnmet and
// NotInjective.
Certificate certify_strain_neighborhood(const Problem& pr, const FeField& u_e, const std::vector<FeField>& candidates,
                                        const CertifyOptions& opt);

Json to_json(const CovReport& c);

}  // namespace rigcert

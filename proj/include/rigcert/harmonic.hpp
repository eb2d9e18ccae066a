#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rigcert/tensor_core.hpp"

namespace rigcert {

// Piecewise-constant field on a union of lattice cells. Cells live in a
// bounding box of extent[0] x extent[1] (x extent[2]) cells of side
// `spacing`; `mask` marks the cells that belong to the domain. Each cell
// carries either a scalar (matrix_dim == 0) or an m x m matrix stored column
// major. Indexing is row-major with x varying fastest.
struct GridField {
  int dim = 2;
  std::array<int, 3> extent{0, 0, 1};
  std::array<double, 3> origin{0, 0, 0};
  double spacing = 1;
  int matrix_dim = 0;
  std::vector<std::uint8_t> mask;
  std::vector<double> values;

  static GridField box(int dim, std::array<int, 3> extent, double spacing, int matrix_dim = 0);

  int components() const { return matrix_dim == 0 ? 1 : matrix_dim * matrix_dim; }
  std::size_t box_cells() const {
    return static_cast<std::size_t>(extent[0]) * extent[1] * extent[2];
  }
  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * extent[1] + j) * extent[0] + i;
  }
  std::array<int, 3> coords(std::size_t idx) const;
  bool inside(std::size_t idx) const { return mask[idx] != 0; }
  std::size_t cell_count() const;

  double& at(std::size_t idx, int c = 0) { return values[idx * components() + c]; }
  double at(std::size_t idx, int c = 0) const { return values[idx * components() + c]; }
  Mat matrix(std::size_t idx) const;
  void set_matrix(std::size_t idx, const Mat& m);

  // Same domain and spacing, scalar samples set to zero.
  GridField scalar_like() const;
};

struct Cube {
  std::array<int, 3> corner{0, 0, 0};
  int side = 1;
};
using CubeFamily = std::vector<Cube>;

// Every lattice-aligned cube of side 1 .. min extent that lies inside the
// domain, ordered by side, then corner in row-major order.
CubeFamily cube_family(const GridField& field);

// Per-cube mean of the field (component-wise) and mean oscillation
// (Frobenius norm for matrix samples). Summation runs over the cube's cells
// in row-major order.
struct CubeStats {
  std::vector<double> mean_abs;
  std::vector<double> oscillation;
};
CubeStats cube_stats(const GridField& field, const CubeFamily& family);

GridField hl_maximal(const GridField& field, const CubeFamily& family);
GridField fs_sharp(const GridField& field, const CubeFamily& family);
double bmo_seminorm(const GridField& field, const CubeFamily& family);
double bmo_l1_norm(const GridField& field, const CubeFamily& family);

// Domain averages over the cells of the domain.
Mat domain_mean(const GridField& field);  // 1x1 for scalar fields
double mean_abs_pow(const GridField& field, double p);  // average of |psi|^p
double normalized_norm(const GridField& field, double p);  // (average |psi|^p)^(1/p)

struct PointwiseReport {
  double max_abs_violation = 0;    // max of |psi| - psi*
  double max_sharp_violation = 0;  // max of psi# - 2 psi*
  std::size_t violations = 0;      // cells above 1e-14
};
PointwiseReport verify_pointwise_bounds(const GridField& field);

// Smallest F with avg|psi|^q <= F (avg|psi#|^q + |avg psi|^q) over the family.
double fit_local_fs_constant(std::span<const GridField> fields, double q);

// Exponents (1 - p/q, p/q) of the reverse Holder form.
std::pair<double, double> rh_exponents(double p, double q);

struct InterpolationReport {
  double lhs = 0;           // |psi|_q
  double rh_rhs = 0;        // J2 bmo_l1^(1-p/q) |psi|_p^(p/q)
  double interp_rhs = 0;    // |psi|_1^theta |psi|_q^(1-theta)
  double norm_p = 0;
  bool rh_ok = false;
  bool interp_ok = false;
};
InterpolationReport verify_interpolation(const GridField& field, double p, double q, double j2);

// Largest ratio |psi|_q / (bmo_l1^(1-p/q) |psi|_p^(p/q)) over the family:
// the smallest J2 for which every member satisfies the reverse Holder form.
double fit_interpolation_constant(std::span<const GridField> fields, double p, double q);

// |psi*|_p / |psi|_p for one scalar field.
double hl_ratio(const GridField& field, double p);

void write_grid_field(std::ostream& out, const GridField& field);
GridField read_grid_field(std::istream& in);

}  // namespace rigcert

#include "rigcert/harmonic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rigcert/error.hpp"
#include "rigcert/parallel.hpp"

namespace rigcert {

GridField GridField::box(int dim, std::array<int, 3> extent, double spacing, int matrix_dim) {
  if (dim < 2 || dim > 3) fail(ErrorCode::DimensionMismatch, "grid dimension must be 2 or 3");
  if (dim == 2) extent[2] = 1;
  if (!(spacing > 0)) fail(ErrorCode::ConfigError, "grid spacing must be positive");
  GridField g;
  g.dim = dim;
  g.extent = extent;
  g.spacing = spacing;
  g.matrix_dim = matrix_dim;
  g.mask.assign(g.box_cells(), 1);
  g.values.assign(g.box_cells() * g.components(), 0.0);
  return g;
}

std::array<int, 3> GridField::coords(std::size_t idx) const {
  const auto nx = static_cast<std::size_t>(extent[0]), ny = static_cast<std::size_t>(extent[1]);
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny), static_cast<int>(idx / (nx * ny))};
}

std::size_t GridField::cell_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

Mat GridField::matrix(std::size_t idx) const {
  const int m = matrix_dim;
  Mat a(m, m);
  for (int c = 0; c < m * m; ++c) a(c % m, c / m) = at(idx, c);
  return a;
}

void GridField::set_matrix(std::size_t idx, const Mat& a) {
  const int m = matrix_dim;
  for (int c = 0; c < m * m; ++c) at(idx, c) = a(c % m, c / m);
}

GridField GridField::scalar_like() const {
  GridField g = *this;
  g.matrix_dim = 0;
  g.values.assign(box_cells(), 0.0);
  return g;
}

namespace {

// Summed-volume table of the mask for O(1) containment tests.
class MaskTable {
 public:
  explicit MaskTable(const GridField& f) : nx_(f.extent[0] + 1), ny_(f.extent[1] + 1), nz_(f.extent[2] + 1) {
    table_.assign(static_cast<std::size_t>(nx_) * ny_ * nz_, 0);
    for (int k = 1; k < nz_; ++k)
      for (int j = 1; j < ny_; ++j)
        for (int i = 1; i < nx_; ++i)
          at(i, j, k) = f.mask[f.index(i - 1, j - 1, k - 1)] + at(i - 1, j, k) + at(i, j - 1, k) + at(i, j, k - 1) -
                        at(i - 1, j - 1, k) - at(i - 1, j, k - 1) - at(i, j - 1, k - 1) + at(i - 1, j - 1, k - 1);
  }

  long count(std::array<int, 3> lo, std::array<int, 3> hi) const {
    return at(hi[0], hi[1], hi[2]) - at(lo[0], hi[1], hi[2]) - at(hi[0], lo[1], hi[2]) - at(hi[0], hi[1], lo[2]) +
           at(lo[0], lo[1], hi[2]) + at(lo[0], hi[1], lo[2]) + at(hi[0], lo[1], lo[2]) - at(lo[0], lo[1], lo[2]);
  }

 private:
  long& at(int i, int j, int k) { return table_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i]; }
  long at(int i, int j, int k) const { return table_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i]; }
  int nx_, ny_, nz_;
  std::vector<long> table_;
};

template <class Fn>
void for_cells(const GridField& f, const Cube& q, Fn&& fn) {
  const int kz = f.dim == 3 ? q.side : 1;
  for (int k = 0; k < kz; ++k)
    for (int j = 0; j < q.side; ++j)
      for (int i = 0; i < q.side; ++i) fn(f.index(q.corner[0] + i, q.corner[1] + j, q.corner[2] + k));
}

std::size_t cube_cells(const GridField& f, const Cube& q) {
  const auto s = static_cast<std::size_t>(q.side);
  return f.dim == 3 ? s * s * s : s * s;
}

double sample_abs(const GridField& f, std::size_t idx) {
  const int nc = f.components();
  if (nc == 1) return std::abs(f.at(idx));
  double s = 0;
  for (int c = 0; c < nc; ++c) s += f.at(idx, c) * f.at(idx, c);
  return std::sqrt(s);
}

void require_scalar(const GridField& f, const char* op) {
  if (f.matrix_dim != 0) fail(ErrorCode::DimensionMismatch, std::string(op) + " needs a scalar field");
}

void require_nonempty(const GridField& f) {
  if (f.cell_count() == 0) fail(ErrorCode::EmptyDomain, "grid field has no cells");
}

}  // namespace

CubeFamily cube_family(const GridField& field) {
  require_nonempty(field);
  const MaskTable table(field);
  const int kz = field.dim == 3 ? 1 : 0;
  int max_side = std::min(field.extent[0], field.extent[1]);
  if (field.dim == 3) max_side = std::min(max_side, field.extent[2]);
  CubeFamily family;
  for (int s = 1; s <= max_side; ++s) {
    const long full = field.dim == 3 ? static_cast<long>(s) * s * s : static_cast<long>(s) * s;
    const int z_end = field.dim == 3 ? field.extent[2] - s : 0;
    for (int k = 0; k <= z_end; ++k)
      for (int j = 0; j + s <= field.extent[1]; ++j)
        for (int i = 0; i + s <= field.extent[0]; ++i) {
          if (table.count({i, j, k}, {i + s, j + s, k + s * kz + (1 - kz)}) == full) family.push_back({{i, j, k}, s});
        }
  }
  return family;
}

CubeStats cube_stats(const GridField& field, const CubeFamily& family) {
  const int nc = field.components();
  CubeStats stats;
  stats.mean_abs.resize(family.size());
  stats.oscillation.resize(family.size());
  parallel_for(family.size(), [&](std::size_t qi) {
    const Cube& q = family[qi];
    const double count = static_cast<double>(cube_cells(field, q));
    double mean[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    double abs_sum = 0;
    for_cells(field, q, [&](std::size_t idx) {
      for (int c = 0; c < nc; ++c) mean[c] += field.at(idx, c);
      abs_sum += sample_abs(field, idx);
    });
    for (int c = 0; c < nc; ++c) mean[c] /= count;
    double osc = 0;
    for_cells(field, q, [&](std::size_t idx) {
      if (nc == 1) {
        osc += std::abs(field.at(idx) - mean[0]);
      } else {
        double s = 0;
        for (int c = 0; c < nc; ++c) s += (field.at(idx, c) - mean[c]) * (field.at(idx, c) - mean[c]);
        osc += std::sqrt(s);
      }
    });
    stats.mean_abs[qi] = abs_sum / count;
    stats.oscillation[qi] = osc / count;
  });
  return stats;
}

namespace {

GridField scatter_max(const GridField& field, const CubeFamily& family, const std::vector<double>& per_cube) {
  GridField out = field.scalar_like();
  for (std::size_t qi = 0; qi < family.size(); ++qi) {
    const double v = per_cube[qi];
    for_cells(field, family[qi], [&](std::size_t idx) { out.at(idx) = std::max(out.at(idx), v); });
  }
  return out;
}

}  // namespace

GridField hl_maximal(const GridField& field, const CubeFamily& family) {
  require_scalar(field, "hl_maximal");
  return scatter_max(field, family, cube_stats(field, family).mean_abs);
}

GridField fs_sharp(const GridField& field, const CubeFamily& family) {
  return scatter_max(field, family, cube_stats(field, family).oscillation);
}

double bmo_seminorm(const GridField& field, const CubeFamily& family) {
  const CubeStats stats = cube_stats(field, family);
  double best = 0;
  for (double v : stats.oscillation) best = std::max(best, v);
  return best;
}

double bmo_l1_norm(const GridField& field, const CubeFamily& family) {
  return bmo_seminorm(field, family) + fnorm(domain_mean(field));
}

Mat domain_mean(const GridField& field) {
  require_nonempty(field);
  const int m = field.matrix_dim == 0 ? 1 : field.matrix_dim;
  const int nc = field.components();
  Mat sum = Mat::Zero(m, m);
  double count = 0;
  for (std::size_t idx = 0; idx < field.box_cells(); ++idx) {
    if (!field.inside(idx)) continue;
    for (int c = 0; c < nc; ++c) sum(c % m, c / m) += field.at(idx, c);
    count += 1;
  }
  return sum / count;
}

double mean_abs_pow(const GridField& field, double p) {
  require_nonempty(field);
  double sum = 0, count = 0;
  for (std::size_t idx = 0; idx < field.box_cells(); ++idx) {
    if (!field.inside(idx)) continue;
    sum += std::pow(sample_abs(field, idx), p);
    count += 1;
  }
  return sum / count;
}

double normalized_norm(const GridField& field, double p) { return std::pow(mean_abs_pow(field, p), 1 / p); }

PointwiseReport verify_pointwise_bounds(const GridField& field) {
  require_scalar(field, "verify_pointwise_bounds");
  const CubeFamily family = cube_family(field);
  const CubeStats stats = cube_stats(field, family);
  const GridField star = scatter_max(field, family, stats.mean_abs);
  const GridField sharp = scatter_max(field, family, stats.oscillation);
  PointwiseReport r;
  r.max_abs_violation = -std::numeric_limits<double>::infinity();
  r.max_sharp_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < field.box_cells(); ++idx) {
    if (!field.inside(idx)) continue;
    const double a = std::abs(field.at(idx)) - star.at(idx);
    const double b = sharp.at(idx) - 2 * star.at(idx);
    r.max_abs_violation = std::max(r.max_abs_violation, a);
    r.max_sharp_violation = std::max(r.max_sharp_violation, b);
    if (a > 1e-14 || b > 1e-14) ++r.violations;
  }
  return r;
}

double fit_local_fs_constant(std::span<const GridField> fields, double q) {
  if (!(q > 1)) fail(ErrorCode::BadExponents, "q must exceed 1");
  double best = 0;
  bool any = false;
  for (const GridField& f : fields) {
    const double lhs = mean_abs_pow(f, q);
    if (lhs == 0) continue;
    any = true;
    const GridField sharp = fs_sharp(f, cube_family(f));
    const double rhs = mean_abs_pow(sharp, q) + std::pow(fnorm(domain_mean(f)), q);
    best = std::max(best, lhs / rhs);
  }
  if (!any) fail(ErrorCode::DegenerateFamily, "every field in the family vanishes");
  return best;
}

std::pair<double, double> rh_exponents(double p, double q) {
  if (!(p >= 1 && p < q)) fail(ErrorCode::BadExponents, "need 1 <= p < q");
  return {(q - p) / q, p / q};
}

InterpolationReport verify_interpolation(const GridField& field, double p, double q, double j2) {
  const auto [a, b] = rh_exponents(p, q);
  const CubeFamily family = cube_family(field);
  InterpolationReport r;
  r.lhs = normalized_norm(field, q);
  r.norm_p = normalized_norm(field, p);
  r.rh_rhs = j2 * std::pow(bmo_l1_norm(field, family), a) * std::pow(mean_abs_pow(field, p), 1 / q);
  const double theta = (1 / p - 1 / q) / (1 - 1 / q);
  r.interp_rhs = std::pow(normalized_norm(field, 1), theta) * std::pow(r.lhs, 1 - theta);
  const double tol = 1e-12;
  r.rh_ok = r.lhs <= r.rh_rhs * (1 + tol) + tol * 1e-3;
  r.interp_ok = r.norm_p <= r.interp_rhs * (1 + tol) + tol * 1e-3;
  (void)b;
  return r;
}

double fit_interpolation_constant(std::span<const GridField> fields, double p, double q) {
  const auto [a, b] = rh_exponents(p, q);
  (void)b;
  double best = 0;
  bool any = false;
  for (const GridField& f : fields) {
    const double lhs = normalized_norm(f, q);
    if (lhs == 0) continue;
    any = true;
    const double rhs = std::pow(bmo_l1_norm(f, cube_family(f)), a) * std::pow(mean_abs_pow(f, p), 1 / q);
    best = std::max(best, lhs / rhs);
  }
  if (!any) fail(ErrorCode::DegenerateFamily, "every field in the family vanishes");
  return best;
}

double hl_ratio(const GridField& field, double p) {
  const GridField star = hl_maximal(field, cube_family(field));
  const double den = normalized_norm(field, p);
  if (den == 0) fail(ErrorCode::DegenerateFamily, "zero field has no maximal ratio");
  return normalized_norm(star, p) / den;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(ErrorCode::ParseError, "bad number '" + s + "'");
  return v;
}

void expect_key(std::istream& in, const char* key) {
  std::string word;
  if (!(in >> word) || word != key) fail(ErrorCode::ParseError, std::string("expected '") + key + "'");
}

}  // namespace

void write_grid_field(std::ostream& out, const GridField& f) {
  out << "dims " << f.dim;
  for (int d = 0; d < f.dim; ++d) out << ' ' << f.extent[d];
  out << "\norigin";
  for (int d = 0; d < f.dim; ++d) out << ' ' << format_double(f.origin[d]);
  out << "\nspacing " << format_double(f.spacing) << "\nmatrix " << f.matrix_dim << "\ncells " << f.cell_count()
      << '\n';
  for (std::size_t idx = 0; idx < f.box_cells(); ++idx) {
    if (!f.inside(idx)) continue;
    const auto c = f.coords(idx);
    for (int d = 0; d < f.dim; ++d) out << c[d] << ' ';
    for (int k = 0; k < f.components(); ++k) out << (k ? " " : "") << format_double(f.at(idx, k));
    out << '\n';
  }
}

GridField read_grid_field(std::istream& in) {
  std::string tok;
  expect_key(in, "dims");
  int dim = 0;
  in >> dim;
  if (dim < 2 || dim > 3) fail(ErrorCode::ParseError, "dims must be 2 or 3");
  std::array<int, 3> extent{1, 1, 1};
  for (int d = 0; d < dim; ++d) in >> extent[d];
  std::array<double, 3> origin{0, 0, 0};
  expect_key(in, "origin");
  for (int d = 0; d < dim; ++d) {
    in >> tok;
    origin[d] = parse_double(tok);
  }
  expect_key(in, "spacing");
  in >> tok;
  const double spacing = parse_double(tok);
  expect_key(in, "matrix");
  int matrix_dim = 0;
  in >> matrix_dim;
  expect_key(in, "cells");
  std::size_t cells = 0;
  in >> cells;
  if (!in) fail(ErrorCode::ParseError, "truncated grid field header");
  GridField f = GridField::box(dim, extent, spacing, matrix_dim);
  f.origin = origin;
  std::fill(f.mask.begin(), f.mask.end(), std::uint8_t{0});
  for (std::size_t n = 0; n < cells; ++n) {
    std::array<int, 3> c{0, 0, 0};
    for (int d = 0; d < dim; ++d) in >> c[d];
    if (!in) fail(ErrorCode::ParseError, "truncated grid field sample list");
    for (int d = 0; d < dim; ++d)
      if (c[d] < 0 || c[d] >= extent[d]) fail(ErrorCode::ParseError, "cell index out of range");
    const std::size_t idx = f.index(c[0], c[1], c[2]);
    if (f.mask[idx]) fail(ErrorCode::ParseError, "duplicate cell");
    f.mask[idx] = 1;
    for (int k = 0; k < f.components(); ++k) {
      in >> tok;
      const double v = parse_double(tok);
      if (!std::isfinite(v)) fail(ErrorCode::ParseError, "non-finite sample");
      f.at(idx, k) = v;
    }
  }
  return f;
}

}  // namespace rigcert

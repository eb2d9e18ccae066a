#include "rigcert/tensor_core.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "rigcert/error.hpp"

namespace rigcert {

Mat identity(int n) { return Mat::Identity(n, n); }

SymEigen sym_eigen(const Mat& s) {
  const int n = static_cast<int>(s.rows());
  if (s.cols() != n) fail(ErrorCode::DimensionMismatch, "sym_eigen needs a square matrix");
  Mat a = sym(s);
  Mat v = identity(n);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0 || off <= 1e-36 * a.squaredNorm()) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  SymEigen out{a.diagonal(), v};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (out.values(j) < out.values(i)) {
        std::swap(out.values(i), out.values(j));
        out.vectors.col(i).swap(out.vectors.col(j));
      }
    }
  }
  return out;
}

Polar polar_decompose(const Mat& f) {
  const int n = static_cast<int>(f.rows());
  if (f.cols() != n || n < 2 || n > 3) fail(ErrorCode::DimensionMismatch, "polar_decompose needs n x n, n in {2,3}");
  const double det = f.determinant();
  if (!(det > 0)) fail(ErrorCode::DetNonPositive, "det F = " + std::to_string(det));
  const SymEigen e = sym_eigen(f.transpose() * f);
  const double lo = e.values(0), hi = e.values(n - 1);
  if (!(lo > 0) || std::sqrt(hi / lo) > 1e14) fail(ErrorCode::Singular, "cond(F) exceeds 1e14");
  Vec sv(n), inv(n);
  for (int i = 0; i < n; ++i) {
    sv(i) = std::sqrt(e.values(i));
    inv(i) = 1 / sv(i);
  }
  Polar p;
  p.U = sym(e.vectors * sv.asDiagonal() * e.vectors.transpose());
  p.R = f * (e.vectors * inv.asDiagonal() * e.vectors.transpose());
  return p;
}

double dist_to_rotations(const Mat& f) {
  const int n = static_cast<int>(f.rows());
  if (f.cols() != n || n < 2 || n > 3) fail(ErrorCode::DimensionMismatch, "dist_to_rotations needs n x n, n in {2,3}");
  if (!(f.determinant() > 0)) fail(ErrorCode::DetNonPositive, "dist_to_rotations needs det F > 0");
  // Summing (sigma_i - 1)^2 from the eigenvalues of F^T F equals |U - I|
  // without forming U.
  const SymEigen e = sym_eigen(f.transpose() * f);
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(std::max(e.values(i), 0.0));
    sum += (s - 1) * (s - 1);
  }
  return std::sqrt(sum);
}

Mat strain(const Mat& f) { return 0.5 * (f.transpose() * f - identity(static_cast<int>(f.rows()))); }

Vec wedge(std::span<const Vec> vectors) {
  const std::size_t n = vectors.size() + 1;
  if (n < 2 || n > 3) fail(ErrorCode::DimensionMismatch, "wedge takes one vector in R^2 or two in R^3");
  for (const Vec& v : vectors)
    if (static_cast<std::size_t>(v.size()) != n) fail(ErrorCode::DimensionMismatch, "wedge operand has wrong length");
  Vec w(static_cast<int>(n));
  const Vec& a = vectors[0];
  if (n == 2) {
    w << -a(1), a(0);
  } else {
    const Vec& b = vectors[1];
    w << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  }
  return w;
}

SandwichCheck strain_dist_sandwich(const Mat& f) {
  const double rn = std::sqrt(static_cast<double>(f.rows()));
  SandwichCheck c;
  c.dist = dist_to_rotations(f);
  c.strain_norm = fnorm(strain(f));
  const double d = c.dist, e = c.strain_norm;
  c.lower_gap = 2 * rn * e - d * d;
  c.upper_gap = rn * d * (d + 2 * rn) - 2 * rn * e;
  c.linear_gap = 2 * e - d;
  const double slack = 64 * std::numeric_limits<double>::epsilon() * (1 + d * d + e);
  c.lower_ok = c.lower_gap >= -slack;
  c.upper_ok = c.upper_gap >= -slack;
  c.linear_ok = c.linear_gap >= -slack;
  return c;
}

Mat rotation2(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Mat rotation_from_quaternion(double w, double x, double y, double z) {
  const double s = std::sqrt(w * w + x * x + y * y + z * z);
  w /= s, x /= s, y /= s, z /= s;
  Mat r(3, 3);
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

}  // namespace rigcert

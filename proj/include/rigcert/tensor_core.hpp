#pragma once

#include <Eigen/Dense>
#include <span>

namespace rigcert {

// Small dense tensors with run-time dimension n in {2, 3}; storage stays on
// the stack.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

Mat identity(int n);

// Frobenius inner product and norm. Every matrix norm in the library is this
// one.
inline double ddot(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }
inline double fnorm(const Mat& a) { return a.norm(); }

inline Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }
inline Mat skw(const Mat& a) { return 0.5 * (a - a.transpose()); }

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues are ascending; columns of vectors are orthonormal.
struct SymEigen {
  Vec values;
  Mat vectors;
};
SymEigen sym_eigen(const Mat& s);

// F = R U with U = sqrt(F^T F) symmetric positive definite and R in SO(n).
// Throws DetNonPositive when det F <= 0 and Singular when cond(F) > 1e14.
struct Polar {
  Mat R;
  Mat U;
};
Polar polar_decompose(const Mat& f);

// Frobenius distance |sqrt(F^T F) - I| from F to SO(n); needs det F > 0.
double dist_to_rotations(const Mat& f);

// Green-Lagrange strain (F^T F - I) / 2.
Mat strain(const Mat& f);

// (n-1)-fold exterior product of vectors in R^n, identified with a vector:
// a quarter turn (-a2, a1) for n = 2 and the cross product for n = 3.
Vec wedge(std::span<const Vec> vectors);

// Two-sided comparison between d = dist(F, SO(n)) and |E|:
//   d^2 <= 2 sqrt(n) |E| <= sqrt(n) d (d + 2 sqrt(n)),  and  d <= 2 |E|.
// Needs det F > 0.
struct SandwichCheck {
  double dist = 0;
  double strain_norm = 0;
  double lower_gap = 0;   // 2 sqrt(n)|E| - d^2
  double upper_gap = 0;   // sqrt(n) d (d + 2 sqrt(n)) - 2 sqrt(n)|E|
  double linear_gap = 0;  // 2|E| - d
  bool lower_ok = false;
  bool upper_ok = false;
  bool linear_ok = false;
  bool holds() const { return lower_ok && upper_ok && linear_ok; }
};
SandwichCheck strain_dist_sandwich(const Mat& f);

Mat rotation2(double theta);
// Unit quaternion (w, x, y, z) to a rotation matrix.
Mat rotation_from_quaternion(double w, double x, double y, double z);

}  // namespace rigcert

#ifndef REACHMO_LINALG_HPP
#define REACHMO_LINALG_HPP

// Dense kernels shared by every analysis path: matrix exponential,
// exact affine discretization, adjoint switching functions and the
// positive-part quadrature behind linear support values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "reachmo/error.hpp"

namespace reachmo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Exact discretization of x' = A x + b over one interval of length tau:
/// x(tau) = Abar x(0) + bbar.
struct AffineStep {
  Matrix Abar;
  Vector bbar;
};

namespace detail {

inline void require_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}

// Diagonal Pade approximants r_m = (V - U)^{-1} (V + U) of exp around 0,
// with the backward-error thresholds theta_m in the 1-norm.
inline void pade_terms(const Matrix& A, int m, Matrix& U, Matrix& V) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  switch (m) {
    case 3: {
      constexpr double b[] = {120.0, 60.0, 12.0, 1.0};
      U = A * (b[3] * A2 + b[1] * I);
      V = b[2] * A2 + b[0] * I;
      return;
    }
    case 5: {
      constexpr double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
      const Matrix A4 = A2 * A2;
      U = A * (b[5] * A4 + b[3] * A2 + b[1] * I);
      V = b[4] * A4 + b[2] * A2 + b[0] * I;
      return;
    }
    case 7: {
      constexpr double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                              25200.0,    1512.0,    56.0,      1.0};
      const Matrix A4 = A2 * A2;
      const Matrix A6 = A4 * A2;
      U = A * (b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
      V = b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
      return;
    }
    case 9: {
      constexpr double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                              2162160.0,     110880.0,     3960.0,       90.0,        1.0};
      const Matrix A4 = A2 * A2;
      const Matrix A6 = A4 * A2;
      const Matrix A8 = A6 * A2;
      U = A * (b[9] * A8 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
      V = b[8] * A8 + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
      return;
    }
    default: {
      constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
      const Matrix A4 = A2 * A2;
      const Matrix A6 = A4 * A2;
      const Matrix inner_u = b[13] * A6 + b[11] * A4 + b[9] * A2;
      U = A * (A6 * inner_u + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
      const Matrix inner_v = b[12] * A6 + b[10] * A4 + b[8] * A2;
      V = A6 * inner_v + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
      return;
    }
  }
}

}  // namespace detail

/// e^{A t} by scaling and squaring with a degree-13 (or lower) diagonal Pade
/// approximant chosen from the 1-norm of A t.
inline Matrix expm(const Matrix& A, double t = 1.0) {
  if (A.rows() != A.cols()) throw DimensionError("expm: matrix is not square");
  if (A.rows() == 0) throw DimensionError("expm: empty matrix");
  detail::require_finite(A, "expm");
  if (!std::isfinite(t)) throw DomainError("expm: non-finite time");

  const Matrix At = A * t;
  const double norm = At.cwiseAbs().colwise().sum().maxCoeff();
  if (norm == 0.0) return Matrix::Identity(A.rows(), A.cols());

  static constexpr int degrees[] = {3, 5, 7, 9};
  static constexpr double thetas[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                      9.504178996162932e-1, 2.097847961257068e0};
  Matrix U, V;
  for (int k = 0; k < 4; ++k) {
    if (norm <= thetas[k]) {
      detail::pade_terms(At, degrees[k], U, V);
      return (V - U).partialPivLu().solve(V + U);
    }
  }
  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm > theta13) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const Matrix scaled = At / std::ldexp(1.0, squarings);
  detail::pade_terms(scaled, 13, U, V);
  Matrix E = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

/// (e^{A tau}, [int_0^tau e^{A s} ds] b) from one exponential of the
/// augmented matrix [[A, b], [0, 0]].
inline AffineStep affine_step(const Matrix& A, const Vector& b, double tau) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) throw DimensionError("affine_step: dimension mismatch");
  if (!(tau >= 0.0)) throw DomainError("affine_step: negative or non-finite duration");
  if (b.isZero(0.0)) return {expm(A, tau), Vector::Zero(n)};

  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, 1) = b;
  const Matrix E = expm(aug, tau);
  return {E.topLeftCorner(n, n), E.topRightCorner(n, 1)};
}

/// c^T e^{A (T - t)} b_r: the adjoint sensitivity of c^T x(T) to input r at time t.
inline double switching_function(const Matrix& A, const Vector& b_r, const Vector& c, double T,
                                 double t) {
  if (A.rows() != A.cols() || b_r.size() != A.rows() || c.size() != A.rows())
    throw DimensionError("switching_function: dimension mismatch");
  if (t < 0.0 || t > T) throw DomainError("switching_function: t outside [0, T]");
  return c.dot(expm(A, T - t) * b_r);
}

struct PositivePartOptions {
  int grid_points = 256;     ///< sign-change sampling grid (at least 256 is enforced)
  double root_tol = 1e-12;   ///< bisection width for bracketed roots
  double quad_rel_tol = 1e-13;
  unsigned quad_max_depth = 8;  ///< each piece lies between grid-located roots, so few bisections suffice
};

/// Sign structure of a scalar function on [a, b]: sorted breakpoints and the
/// intervals on which it is positive.
struct PositivePart {
  double integral = 0.0;
  std::vector<double> roots;
  std::vector<std::pair<double, double>> positive_intervals;
};

/// int_a^b [g(t)]_+ dt with roots located on a grid and refined by bisection,
/// then Gauss-Kronrod quadrature on each positive sub-interval.
inline PositivePart positive_part_analysis(const std::function<double(double)>& g, double a,
                                           double b, const PositivePartOptions& opts = {}) {
  PositivePart out;
  if (!(b > a)) return out;
  const int n = std::max(opts.grid_points, 256);
  std::vector<double> ts(n), gs(n);
  for (int j = 0; j < n; ++j) {
    ts[j] = (j == n - 1) ? b : a + (b - a) * static_cast<double>(j) / (n - 1);
    gs[j] = g(ts[j]);
  }

  std::vector<double> breaks{a};
  for (int j = 0; j + 1 < n; ++j) {
    if (gs[j] == 0.0 && j > 0) {
      out.roots.push_back(ts[j]);
      breaks.push_back(ts[j]);
      continue;
    }
    if ((gs[j] < 0.0 && gs[j + 1] > 0.0) || (gs[j] > 0.0 && gs[j + 1] < 0.0)) {
      double lo = ts[j], hi = ts[j + 1];
      double glo = gs[j];
      while (hi - lo > opts.root_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      out.roots.push_back(root);
      breaks.push_back(root);
    }
  }
  breaks.push_back(b);

  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    if (!(hi > lo)) continue;
    if (g(0.5 * (lo + hi)) <= 0.0) continue;
    const double piece = Quad::integrate(g, lo, hi, opts.quad_max_depth, opts.quad_rel_tol);
    out.integral += std::max(piece, 0.0);
    if (!out.positive_intervals.empty() && out.positive_intervals.back().second == lo)
      out.positive_intervals.back().second = hi;
    else
      out.positive_intervals.emplace_back(lo, hi);
  }
  return out;
}

inline double positive_part_integral(const std::function<double(double)>& g, double a, double b,
                                     const PositivePartOptions& opts = {}) {
  return positive_part_analysis(g, a, b, opts).integral;
}

/// Rank of the Kalman controllability matrix [b, A b, ..., A^{n-1} b], with
/// columns normalized before the rank-revealing QR.
inline Eigen::Index controllability_rank(const Matrix& A, const Vector& b, double tol = 1e-10) {
  const Eigen::Index n = A.rows();
  Matrix K(n, n);
  Vector col = b;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double nrm = col.norm();
    K.col(j) = nrm > 0.0 ? Vector(col / nrm) : col;
    col = A * K.col(j);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(K);
  qr.setThreshold(tol);
  return qr.rank();
}

/// True when c^T e^{At} b vanishes identically, i.e. c is orthogonal to the
/// Krylov space span{b, A b, ..., A^{n-1} b}.
inline bool krylov_orthogonal(const Matrix& A, const Vector& b, const Vector& c, double tol = 1e-10) {
  const Eigen::Index n = A.rows();
  Vector col = b;
  const double cn = c.norm();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double nrm = col.norm();
    if (nrm == 0.0) return true;
    col /= nrm;
    if (std::abs(c.dot(col)) > tol * cn) return false;
    col = A * col;
  }
  return true;
}

}  // namespace reachmo

#endif  // REACHMO_LINALG_HPP

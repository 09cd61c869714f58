#ifndef REACHMO_TESTS_ORACLES_HPP
#define REACHMO_TESTS_ORACLES_HPP

// Independent reference computations used to pin library results.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "reachmo/switched.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// e^{A t} from a 60-term Taylor series after scaling to norm < 1/2, then squaring.
inline Matrix taylor_expm(const Matrix& A, double t = 1.0) {
  Matrix X = A * t;
  const double norm = X.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.5) ++s;
  X /= std::ldexp(1.0, s);
  Matrix E = Matrix::Identity(A.rows(), A.cols());
  Matrix term = E;
  for (int k = 1; k <= 60; ++k) {
    term = term * X / static_cast<double>(k);
    E += term;
  }
  for (int k = 0; k < s; ++k) E = E * E;
  return E;
}

/// Adaptive Simpson quadrature of a vector-valued integrand.
inline Vector simpson(const std::function<Vector(double)>& f, double a, double b, double tol, int depth = 40) {
  std::function<Vector(double, double, const Vector&, const Vector&, const Vector&, const Vector&, int)> rec =
      [&](double lo, double hi, const Vector& flo, const Vector& fmid, const Vector& fhi, const Vector& whole,
          int d) -> Vector {
    const double mid = 0.5 * (lo + hi);
    const Vector fl = f(0.5 * (lo + mid)), fr = f(0.5 * (mid + hi));
    const Vector left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const Vector right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    const Vector delta = left + right - whole;
    if (d <= 0 || delta.cwiseAbs().maxCoeff() <= 15.0 * tol) return left + right + delta / 15.0;
    return rec(lo, mid, flo, fl, fmid, left, d - 1) + rec(mid, hi, fmid, fr, fhi, right, d - 1);
  };
  const Vector fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

inline Matrix random_matrix(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = U(rng);
  return A;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = U(rng);
  return v;
}

/// Random matrix shifted so every eigenvalue has real part <= -margin.
inline Matrix random_stable(std::mt19937_64& rng, int n, double margin = 0.2) {
  Matrix A = random_matrix(rng, n);
  const double shift = A.eigenvalues().real().maxCoeff() + margin;
  return A - shift * Matrix::Identity(n, n);
}

inline reachmo::SwitchedAffineSystem random_system(std::mt19937_64& rng, int n, int I, int K1) {
  std::vector<std::vector<reachmo::AffineStep>> steps(static_cast<std::size_t>(K1));
  std::vector<reachmo::AffineStep> shared;
  for (int i = 0; i < I; ++i) {
    reachmo::Matrix A = random_matrix(rng, n);
    A /= std::max(1.0, A.operatorNorm() / 1.1);
    shared.push_back({A, random_vector(rng, n)});
  }
  for (auto& s : steps) s = shared;
  return reachmo::SwitchedAffineSystem::from_steps(steps, random_vector(rng, n));
}

/// Same, with stage-varying maps.
inline reachmo::SwitchedAffineSystem random_varying(std::mt19937_64& rng, int n, int I, int K1) {
  std::vector<std::vector<reachmo::AffineStep>> steps(static_cast<std::size_t>(K1));
  for (auto& s : steps)
    for (int i = 0; i < I; ++i) s.push_back({0.9 * random_matrix(rng, n) / n, random_vector(rng, n)});
  return reachmo::SwitchedAffineSystem::from_steps(steps, random_vector(rng, n));
}

}  // namespace oracle

#endif

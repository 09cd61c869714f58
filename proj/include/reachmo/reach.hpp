#ifndef REACHMO_REACH_HPP
#define REACHMO_REACH_HPP

// Hyperplane method: support values v_T(c) and tangent points, outer
// halfspace approximations and their 2-D projections, for linear moment
// models, switched affine systems and truncated (FSP) probability systems.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "reachmo/fsp.hpp"
#include "reachmo/geometry.hpp"
#include "reachmo/linalg.hpp"
#include "reachmo/milp.hpp"
#include "reachmo/moments.hpp"
#include "reachmo/parallel.hpp"
#include "reachmo/switched.hpp"

namespace reachmo {

struct Halfspace {
  Vector c;
  double v = 0.0;
};

/// Bang-bang input of one channel: `hi` on `high_intervals`, `lo` elsewhere.
struct ChannelSwitching {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> roots;
  std::vector<std::pair<double, double>> high_intervals;
};

struct LinearSupport {
  Vector c;
  double v = 0.0;
  std::vector<ChannelSwitching> inputs;
};

struct SwitchedSupport {
  double v = 0.0;
  ModeSequence sequence;
  Vector terminal;
  BranchBoundStats stats;
};

struct ReachOptions {
  PositivePartOptions quadrature{};
  BranchBoundOptions milp{};
  unsigned threads = 0;  ///< 0: REACHMO_THREADS or 1
};

inline void check_linear_model(const LinearModel& m) {
  const auto n = m.A.rows();
  if (m.A.cols() != n || m.B.rows() != n || m.f.size() != n || m.x0.size() != n)
    throw DimensionError("linear model: inconsistent dimensions");
  if (m.lo.size() != m.B.cols() || m.hi.size() != m.B.cols())
    throw DimensionError("linear model: input bounds do not match B");
  if ((m.hi.array() < m.lo.array()).any()) throw DomainError("linear model: input upper bound below lower bound");
  if (!(m.T > 0.0)) throw DomainError("linear model: horizon must be positive");
}

/// v_T(c) = c^T e^{AT} x_0 + c^T int e^{As} f + sum_r max over u_r of int c^T e^{A(T-t)} b_r u_r(t) dt.
inline LinearSupport support_value_linear(const LinearModel& m, const Vector& c, const PositivePartOptions& q = {}) {
  check_linear_model(m);
  if (c.size() != m.A.rows()) throw DimensionError("support_value_linear: c has wrong length");
  if (c.isZero(0.0)) throw DomainError("support_value_linear: c must be non-zero");
  const auto drift = affine_step(m.A, m.f, m.T);
  LinearSupport out;
  out.c = c;
  out.v = c.dot(drift.Abar * m.x0 + drift.bbar);
  for (Eigen::Index r = 0; r < m.B.cols(); ++r) {
    ChannelSwitching ch{m.lo[r], m.hi[r], {}, {}};
    const Vector b = m.B.col(r);
    if (b.isZero(0.0)) {
      out.inputs.push_back(ch);
      continue;
    }
    out.v += m.lo[r] * c.dot(affine_step(m.A, b, m.T).bbar);
    if (m.hi[r] > m.lo[r]) {
      const Matrix At = m.A.transpose();
      auto g = [&](double t) { return b.dot(expm(At, m.T - t) * c); };
      const auto pp = positive_part_analysis(g, 0.0, m.T, q);
      out.v += (m.hi[r] - m.lo[r]) * pp.integral;
      ch.roots = pp.roots;
      ch.high_intervals = pp.positive_intervals;
    }
    out.inputs.push_back(std::move(ch));
  }
  return out;
}

inline LinearSupport support_value_linear(const LinearModel& m, const Vector& c, const ReachOptions& opt) {
  return support_value_linear(m, c, opt.quadrature);
}

/// Terminal state under u(t) = levels[j] on [breaks[j], breaks[j+1]), with breaks from 0 to T.
inline Vector simulate_linear(const LinearModel& m, const std::vector<double>& breaks, const std::vector<Vector>& levels) {
  check_linear_model(m);
  if (breaks.size() != levels.size() + 1) throw DimensionError("simulate_linear: need one level per interval");
  Vector x = m.x0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double dt = breaks[j + 1] - breaks[j];
    if (dt < 0.0) throw DomainError("simulate_linear: breakpoints not increasing");
    if (dt == 0.0) continue;
    const auto st = affine_step(m.A, Vector(m.B * levels[j] + m.f), dt);
    x = st.Abar * x + st.bbar;
  }
  return x;
}

/// x*_T(c): the state reached under the bang-bang input of `sup`. The input is
/// unique when every switching function c^T e^{A(T-t)} b_r has isolated zeros,
/// which holds for all c when (A, b_r) is reachable and otherwise unless c is
/// orthogonal to the Krylov space of (A, b_r).
inline Vector tangent_point_linear(const LinearModel& m, const LinearSupport& sup) {
  check_linear_model(m);
  const Eigen::Index n = m.A.rows();
  if (sup.inputs.size() != static_cast<std::size_t>(m.B.cols()) || sup.c.size() != n)
    throw DimensionError("tangent_point_linear: support does not match the model");
  std::vector<double> breaks{0.0, m.T};
  for (Eigen::Index r = 0; r < m.B.cols(); ++r) {
    if (!(m.hi[r] > m.lo[r])) continue;
    if (controllability_rank(m.A, m.B.col(r)) < n && krylov_orthogonal(m.A, m.B.col(r), sup.c))
      throw TangentUndefinedError("tangent point undefined: (A, b_" + std::to_string(r) +
                                  ") is not reachable and its switching function vanishes for this c; "
                                  "the support value remains valid");
    for (const auto& [a, b] : sup.inputs[static_cast<std::size_t>(r)].high_intervals) {
      breaks.push_back(a);
      breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<Vector> levels;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double mid = 0.5 * (breaks[j] + breaks[j + 1]);
    Vector u = m.lo;
    for (Eigen::Index r = 0; r < m.B.cols(); ++r)
      for (const auto& [a, b] : sup.inputs[static_cast<std::size_t>(r)].high_intervals)
        if (mid > a && mid < b) u[r] = m.hi[r];
    levels.push_back(u);
  }
  return simulate_linear(m, breaks, levels);
}

inline Vector tangent_point_linear(const LinearModel& m, const Vector& c, const PositivePartOptions& q = {}) {
  return tangent_point_linear(m, support_value_linear(m, c, q));
}

inline SwitchedSupport support_value_switched(const SwitchedAffineSystem& sys, const Vector& c, const BigM& bigM,
                                              const BranchBoundOptions& opt = {}) {
  const auto r = solve_sequence(sys, c, Sense::max, bigM, opt);
  return {r.value, r.sequence, r.trajectory.back(), r.stats};
}

inline SwitchedSupport support_value_switched(const SwitchedAffineSystem& sys, const Vector& c,
                                              const BranchBoundOptions& opt = {}) {
  return support_value_switched(sys, c, compute_bigM(sys), opt);
}

inline std::vector<Halfspace> outer_region(const LinearModel& m, const std::vector<Vector>& dirs,
                                           const ReachOptions& opt = {}) {
  if (dirs.size() < 2) throw DomainError("outer_region: need at least two directions");
  std::vector<Halfspace> out(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t d) { out[d] = {dirs[d], support_value_linear(m, dirs[d], opt).v}; },
               opt.threads);
  return out;
}

inline std::vector<Halfspace> outer_region(const SwitchedAffineSystem& sys, const std::vector<Vector>& dirs,
                                           const ReachOptions& opt = {}) {
  if (dirs.size() < 2) throw DomainError("outer_region: need at least two directions");
  const auto M = compute_bigM(sys);
  std::vector<Halfspace> out(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t d) { out[d] = {dirs[d], support_value_switched(sys, dirs[d], M, opt.milp).v}; },
               opt.threads);
  return out;
}

/// Slack of x in the tightest halfspace (>= 0 means inside).
inline double min_slack(const std::vector<Halfspace>& hs, const Vector& x) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& h : hs) s = std::min(s, h.v - h.c.dot(x));
  return s;
}

struct ProjectedRegion {
  std::vector<ProjectedHalfspace> halfspaces;
  std::vector<Point2> inner_vertices;
  std::string inner_kind;        ///< "tangent points", "convex-hull inner bound" or empty
  std::vector<double> parameters;  ///< theta or gamma per direction, in halfspace order
  std::optional<double> epsilon;
  double seconds = 0.0;
  std::vector<std::string> notes;

  Polygon polygon() const { return polygon_from_halfspaces(halfspaces); }

  /// Smallest slack of y over all halfspaces.
  double slack(const Point2& y) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces) s = std::min(s, h.slack(y));
    return s;
  }
  bool contains(const Point2& y, double tol = 1e-7) const { return slack(y) >= -tol; }
};

/// theta_d = 2 pi d / D.
inline std::vector<double> default_angles(std::size_t D = 64) {
  std::vector<double> th(D);
  for (std::size_t d = 0; d < D; ++d) th[d] = 2.0 * 3.14159265358979323846 * static_cast<double>(d) / static_cast<double>(D);
  return th;
}

/// tan of D equispaced mid-cell angles in (-pi/2, pi/2).
inline std::vector<double> default_gammas(std::size_t D = 32) {
  constexpr double pi = 3.14159265358979323846;
  std::vector<double> g(D);
  for (std::size_t d = 0; d < D; ++d) g[d] = std::tan(-pi / 2 + pi * (static_cast<double>(d) + 0.5) / static_cast<double>(D));
  return g;
}

namespace detail {

inline void check_outputs(const Vector& l1, const Vector& l2, Eigen::Index n) {
  if (l1.size() != n || l2.size() != n) throw DimensionError("projection: output vectors have wrong length");
  if (l1.isZero(0.0) || l2.isZero(0.0)) throw DomainError("projection: output vectors must be non-zero");
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Halfspaces cos(theta) y1 + sin(theta) y2 <= v_T(cos(theta) l1 + sin(theta) l2) and the
/// projected tangent points (inner approximation; the linear reachable set is convex).
inline ProjectedRegion project_2d(const LinearModel& m, const Vector& l1, const Vector& l2,
                                  const std::vector<double>& angles, const ReachOptions& opt = {}) {
  check_linear_model(m);
  detail::check_outputs(l1, l2, m.A.rows());
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t D = angles.size();
  std::vector<LinearSupport> sup(D);
  parallel_for(D, [&](std::size_t d) {
    sup[d] = support_value_linear(m, Vector(std::cos(angles[d]) * l1 + std::sin(angles[d]) * l2), opt.quadrature);
  }, opt.threads);
  ProjectedRegion reg;
  reg.parameters = angles;
  for (std::size_t d = 0; d < D; ++d) reg.halfspaces.push_back({std::cos(angles[d]), std::sin(angles[d]), sup[d].v, 0.0});
  try {
    std::vector<Point2> inner(D);
    parallel_for(D, [&](std::size_t d) {
      const Vector x = tangent_point_linear(m, sup[d]);
      inner[d] = Point2(l1.dot(x), l2.dot(x));
    }, opt.threads);
    reg.inner_vertices = std::move(inner);
    reg.inner_kind = "tangent points";
  } catch (const TangentUndefinedError& e) {
    reg.notes.push_back(e.what());
  }
  reg.seconds = detail::seconds_since(t0);
  return reg;
}

/// Same for a switched system; tangent outputs bound the convex hull of the reachable set from inside.
inline ProjectedRegion project_2d(const SwitchedAffineSystem& sys, const Vector& l1, const Vector& l2,
                                  const std::vector<double>& angles, const ReachOptions& opt = {}) {
  detail::check_outputs(l1, l2, static_cast<Eigen::Index>(sys.dim()));
  const auto t0 = std::chrono::steady_clock::now();
  const auto M = compute_bigM(sys);
  const std::size_t D = angles.size();
  std::vector<SwitchedSupport> sup(D);
  parallel_for(D, [&](std::size_t d) {
    sup[d] = support_value_switched(sys, Vector(std::cos(angles[d]) * l1 + std::sin(angles[d]) * l2), M, opt.milp);
  }, opt.threads);
  ProjectedRegion reg;
  reg.parameters = angles;
  for (std::size_t d = 0; d < D; ++d) {
    reg.halfspaces.push_back({std::cos(angles[d]), std::sin(angles[d]), sup[d].v, 0.0});
    reg.inner_vertices.emplace_back(l1.dot(sup[d].terminal), l2.dot(sup[d].terminal));
  }
  reg.inner_kind = "convex-hull inner bound";
  reg.seconds = detail::seconds_since(t0);
  return reg;
}

/// delta(gamma) = 2 eps / (1 - eps) * (max(0, -gamma) ||l1||_inf + ||l2||_inf).
inline double fsp_shift(double gamma, double eps, double l1_inf, double l2_inf) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidCertificateError("mass-loss certificate must lie in [0, 1)");
  return 2.0 * eps / (1.0 - eps) * (std::max(0.0, -gamma) * l1_inf + l2_inf);
}

/// Outer region of the conditional outputs (l1^T P / 1^T P, l2^T P / 1^T P) of the full
/// chain: y2 <= gamma y1 + vbar(l2 - gamma l1) + delta(gamma), clipped by y1, y2 >= 0.
inline ProjectedRegion fsp_projected_outer(const FspModel& model, const Vector& l1, const Vector& l2,
                                           const std::vector<double>& gammas, double eps,
                                           const ReachOptions& opt = {}) {
  const auto n = static_cast<Eigen::Index>(model.size());
  detail::check_outputs(l1, l2, n);
  if ((l1.array() < 0.0).any() || (l2.array() < 0.0).any())
    throw PreconditionError("fsp_projected_outer: output weights must be non-negative");
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidCertificateError("fsp_projected_outer: epsilon must lie in [0, 1)");
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = model.probability_system();
  const auto M = compute_bigM(sys, Vector::Ones(n));
  const double n1 = l1.lpNorm<Eigen::Infinity>(), n2 = l2.lpNorm<Eigen::Infinity>();
  const std::size_t D = gammas.size();
  std::vector<SwitchedSupport> sup(D);
  parallel_for(D, [&](std::size_t d) {
    sup[d] = support_value_switched(sys, Vector(l2 - gammas[d] * l1), M, opt.milp);
  }, opt.threads);
  ProjectedRegion reg;
  reg.epsilon = eps;
  reg.parameters = gammas;
  for (std::size_t d = 0; d < D; ++d)
    reg.halfspaces.push_back({-gammas[d], 1.0, sup[d].v, fsp_shift(gammas[d], eps, n1, n2)});
  reg.halfspaces.push_back({-1.0, 0.0, 0.0, 0.0});
  reg.halfspaces.push_back({0.0, -1.0, 0.0, 0.0});
  reg.seconds = detail::seconds_since(t0);
  return reg;
}

}  // namespace reachmo

#endif  // REACHMO_REACH_HPP

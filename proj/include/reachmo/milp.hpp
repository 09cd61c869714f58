#ifndef REACHMO_MILP_HPP
#define REACHMO_MILP_HPP

// Optimal mode sequences for c^T x_{K+1} of a switched affine system.
// The big-M mixed-integer program over stage indicators gamma_i^k is solved
// by best-first branch and bound; a plain enumeration serves as oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "reachmo/lp.hpp"
#include "reachmo/switched.hpp"

namespace reachmo {

enum class Sense { max, min };

struct BigM {
  Vector M;                 ///< global bound, M >= |x_k| for every k and sequence
  std::vector<Vector> stage;  ///< stage-wise refinement M^k, k = 0..K+1
  bool user_override = false;
  std::vector<std::string> warnings;
};

inline constexpr double kBigMFloor = 1e-9;

/// Interval propagation m_{k+1} = max_i (|Abar_i^k| m_k + |bbar_i^k|), optionally
/// replaced by a user vector (kept, with a warning if it undercuts the propagation).
inline BigM compute_bigM(const SwitchedAffineSystem& sys, const std::optional<Vector>& user = std::nullopt) {
  BigM out;
  const auto n = static_cast<Eigen::Index>(sys.dim());
  Vector m = sys.x0().cwiseAbs();
  out.stage.push_back(m);
  for (std::size_t k = 0; k < sys.num_stages(); ++k) {
    Vector next = Vector::Zero(n);
    for (std::size_t i = 0; i < sys.num_modes(); ++i) {
      const auto& st = sys.step(k, i);
      next = next.cwiseMax(st.Abar.cwiseAbs() * m + st.bbar.cwiseAbs());
    }
    m = next;
    out.stage.push_back(m);
  }
  out.M = Vector::Zero(n);
  for (auto& s : out.stage) {
    s = s.cwiseMax(kBigMFloor);
    out.M = out.M.cwiseMax(s);
  }
  if (user) {
    if (user->size() != n) throw DimensionError("compute_bigM: user M has wrong length");
    if ((user->array() <= 0.0).any()) throw DomainError("compute_bigM: user M must be positive");
    out.user_override = true;
    for (Eigen::Index p = 0; p < n; ++p)
      if ((*user)[p] < out.M[p] * (1.0 - 1e-12))
        out.warnings.push_back("user M[" + std::to_string(p) + "] = " + std::to_string((*user)[p]) +
                               " is below the propagated bound " + std::to_string(out.M[p]));
    out.M = *user;
    for (auto& s : out.stage) s = s.cwiseMin(*user);
  }
  return out;
}

struct MilpSolution {
  double value = 0.0;
  ModeSequence sequence;
  std::vector<Vector> trajectory;
};

/// Lexicographically smaller sequence wins when two values agree within `tol`.
inline bool better_candidate(double v, const ModeSequence& s, double best, const ModeSequence& best_seq,
                             double tol) {
  if (best_seq.empty()) return true;
  if (v > best + tol) return true;
  if (v >= best - tol) return s < best_seq;
  return false;
}

inline double tie_tolerance(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

struct EnumerateOptions {
  double cap = 2e6;
};

/// Exhaustive optimum over all I^{K+1} sequences, with prefix sharing.
inline MilpSolution enumerate_oracle(const SwitchedAffineSystem& sys, const Vector& c, Sense sense,
                                     const EnumerateOptions& opt = {}) {
  if (c.size() != static_cast<Eigen::Index>(sys.dim())) throw DimensionError("enumerate_oracle: c has wrong length");
  const double I = static_cast<double>(sys.num_modes());
  const double total = std::pow(I, static_cast<double>(sys.num_stages()));
  if (total > opt.cap)
    throw CapExceeded("enumerate_oracle: " + std::to_string(total) + " sequences exceed the cap", total);
  const Vector w = sense == Sense::max ? Vector(c) : Vector(-c);
  const std::size_t K1 = sys.num_stages();
  ModeSequence seq(K1, 0), best_seq;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Vector> xs(K1 + 1);
  xs[0] = sys.x0();
  // Depth-first walk in lexicographic order.
  std::size_t depth = 0;
  seq[0] = -1;
  while (true) {
    ++seq[depth];
    if (static_cast<std::size_t>(seq[depth]) >= sys.num_modes()) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    const auto& st = sys.step(depth, seq[depth]);
    xs[depth + 1] = st.Abar * xs[depth] + st.bbar;
    if (depth + 1 == K1) {
      const double v = w.dot(xs[K1]);
      if (better_candidate(v, seq, best, best_seq, tie_tolerance(v))) {
        best = v;
        best_seq = seq;
      }
    } else {
      ++depth;
      seq[depth] = -1;
    }
  }
  MilpSolution out;
  out.sequence = best_seq;
  out.trajectory = sys.trajectory(best_seq);
  out.value = c.dot(out.trajectory.back());
  return out;
}

enum class LpPolicy { always, adaptive, never };

struct BranchBoundOptions {
  LpPolicy lp = LpPolicy::adaptive;
  std::size_t lp_max_columns = 600;  ///< relaxations larger than this are never built
  double lp_cost_factor = 4.0;       ///< adaptive: solve the LP when it is this much cheaper than the subtree
  LpOptions lp_options{};
  std::size_t max_nodes = 50'000'000;
  double bigM_check_tol = 1e-9;
};

struct BranchBoundStats {
  std::size_t nodes = 0;       ///< bound evaluations (prefixes of length 0..K)
  std::size_t leaves = 0;      ///< complete sequences evaluated
  std::size_t lp_solves = 0;
  std::size_t pruned = 0;
  double root_bound = std::numeric_limits<double>::infinity();
  std::optional<double> root_lp_bound;
};

struct SolveResult : MilpSolution {
  BranchBoundStats stats;
};

namespace detail {

/// Bounds on max w^T x_{K+1} over completions of a prefix, all valid upper bounds.
class NodeBounder {
 public:
  NodeBounder(const SwitchedAffineSystem& sys, const Vector& w, const BigM& bigM, const BranchBoundOptions& opt)
      : sys_(sys), w_(w), bigM_(bigM), opt_(opt) {
    const std::size_t K1 = sys.num_stages();
    const auto n = static_cast<Eigen::Index>(sys.dim());

    // Stages from `common_from_` on have the same Abar in every mode.
    common_from_ = K1;
    for (std::size_t k = K1; k-- > 0;) {
      bool same = true;
      for (std::size_t i = 1; i < sys.num_modes() && same; ++i) same = sys.step(k, i).Abar == sys.step(k, 0).Abar;
      if (!same) break;
      common_from_ = k;
    }
    lambda_.assign(K1 + 1, Vector());
    beta_exact_.assign(K1 + 1, 0.0);
    lambda_[K1] = w;
    for (std::size_t k = K1; k-- > common_from_;) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < sys.num_modes(); ++i) best = std::max(best, lambda_[k + 1].dot(sys.step(k, i).bbar));
      beta_exact_[k] = beta_exact_[k + 1] + best;
      lambda_[k] = sys.step(k, 0).Abar.transpose() * lambda_[k + 1];
    }

    // Non-negative systems: states stay in the orthant, so an element-wise max
    // of the co-states bounds every mode choice.
    nonneg_ = (sys.x0().array() >= 0.0).all();
    const double tol = 1e-13;
    for (std::size_t k = 0; k < K1 && nonneg_; ++k)
      for (std::size_t i = 0; i < sys.num_modes() && nonneg_; ++i) {
        const auto& st = sys.step(k, i);
        nonneg_ = (st.Abar.array() >= -tol).all() && (st.bbar.array() >= -tol).all();
      }
    if (nonneg_) {
      cone_w_.assign(K1 + 1, Vector());
      cone_beta_.assign(K1 + 1, 0.0);
      cone_w_[K1] = w;
      for (std::size_t k = K1; k-- > 0;) {
        Vector wk = Vector::Constant(n, -std::numeric_limits<double>::infinity());
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sys.num_modes(); ++i) {
          const auto& st = sys.step(k, i);
          wk = wk.cwiseMax(st.Abar.transpose() * cone_w_[k + 1]);
          best = std::max(best, cone_w_[k + 1].dot(st.bbar.cwiseMax(0.0)));
        }
        cone_w_[k] = wk;
        cone_beta_[k] = cone_beta_[k + 1] + best;
      }
    }
  }

  bool exact_from(std::size_t depth) const { return depth >= common_from_; }

  /// Returns the tightest available bound for completions of a prefix of length `depth` at state x.
  double bound(std::size_t depth, const Vector& x, bool try_lp, BranchBoundStats& stats,
               std::optional<double>* lp_out = nullptr) const {
    if (depth >= common_from_) return w_exact(depth, x);
    double b = nonneg_ && (x.array() >= 0.0).all() ? cone_w_[depth].dot(x) + cone_beta_[depth]
                                                   : interval_bound(depth, x);
    if (try_lp && lp_columns(depth) <= opt_.lp_max_columns) {
      const double lpb = lp_bound(depth, x);
      ++stats.lp_solves;
      if (lp_out) *lp_out = lpb;
      b = std::min(b, lpb);
    }
    return b;
  }

  std::size_t lp_columns(std::size_t depth) const {
    const std::size_t R = sys_.num_stages() - depth, I = sys_.num_modes(), n = sys_.dim();
    return R * (I + n * I);
  }

  /// Flop estimate of a dense simplex solve on the relaxation.
  double lp_cost(std::size_t depth) const {
    const double R = static_cast<double>(sys_.num_stages() - depth);
    const double I = static_cast<double>(sys_.num_modes()), n = static_cast<double>(sys_.dim());
    const double rows = R * (4.0 * n * I + 1.0), cols = static_cast<double>(lp_columns(depth)) + 2.0 * rows;
    return rows * cols * rows;
  }

  double subtree_cost(std::size_t depth) const {
    const double n = static_cast<double>(sys_.dim());
    return std::pow(static_cast<double>(sys_.num_modes()), static_cast<double>(sys_.num_stages() - depth)) * n * n;
  }

  /// Box [lo, hi] containing x_k for every completion, k = depth..K+1.
  void boxes(std::size_t depth, const Vector& x, std::vector<Vector>& lo, std::vector<Vector>& hi) const {
    const std::size_t K1 = sys_.num_stages();
    Vector center = x, radius = Vector::Zero(x.size());
    lo.assign(K1 + 1, Vector());
    hi.assign(K1 + 1, Vector());
    lo[depth] = x;
    hi[depth] = x;
    for (std::size_t k = depth; k < K1; ++k) {
      Vector l = Vector::Constant(x.size(), std::numeric_limits<double>::infinity());
      Vector h = -l;
      for (std::size_t i = 0; i < sys_.num_modes(); ++i) {
        const auto& st = sys_.step(k, i);
        const Vector ci = st.Abar * center + st.bbar;
        const Vector ri = st.Abar.cwiseAbs() * radius;
        l = l.cwiseMin(ci - ri);
        h = h.cwiseMax(ci + ri);
      }
      lo[k + 1] = l;
      hi[k + 1] = h;
      center = 0.5 * (l + h);
      radius = 0.5 * (h - l);
    }
  }

 private:
  double w_exact(std::size_t depth, const Vector& x) const { return lambda_[depth].dot(x) + beta_exact_[depth]; }

  double interval_bound(std::size_t depth, const Vector& x) const {
    std::vector<Vector> lo, hi;
    boxes(depth, x, lo, hi);
    const auto& l = lo.back();
    const auto& h = hi.back();
    double b = 0.0;
    for (Eigen::Index p = 0; p < x.size(); ++p) b += std::max(w_[p] * l[p], w_[p] * h[p]);
    return b;
  }

  double lp_bound(std::size_t depth, const Vector& x) const {
    std::vector<Vector> lo, hi;
    boxes(depth, x, lo, hi);
    const std::size_t K1 = sys_.num_stages();
    std::vector<Vector> Mk(K1 + 1);
    for (std::size_t k = depth + 1; k <= K1; ++k)
      Mk[k] = lo[k].cwiseAbs().cwiseMax(hi[k].cwiseAbs()).cwiseMax(kBigMFloor).cwiseMin(bigM_.stage[k]);
    const LinearProgram lp = relaxation(sys_, w_, depth, x, Mk);
    return solve_lp(lp, opt_.lp_options).bound;
  }

 public:
  /// LP relaxation of the big-M program over stages depth..K with the state
  /// x_depth fixed; z_i^{k+1} = diag(M^{k+1}) zeta_i^{k+1}, zeta in [-1, 1].
  static LinearProgram relaxation(const SwitchedAffineSystem& sys, const Vector& w, std::size_t depth,
                                  const Vector& x, const std::vector<Vector>& Mk) {
    const std::size_t K1 = sys.num_stages(), I = sys.num_modes(), n = sys.dim();
    const std::size_t R = K1 - depth;
    const std::size_t per_stage = I + n * I;
    const auto cols = static_cast<Eigen::Index>(R * per_stage);
    const auto rows = static_cast<Eigen::Index>(R * (4 * n * I + 1));
    LinearProgram lp;
    lp.A = Matrix::Zero(rows, cols);
    lp.b = Vector::Zero(rows);
    lp.sense.assign(static_cast<std::size_t>(rows), RowSense::le);
    lp.c = Vector::Zero(cols);
    lp.lo = Vector::Constant(cols, -1.0);
    lp.hi = Vector::Constant(cols, 1.0);
    auto gamma = [&](std::size_t s, std::size_t i) { return static_cast<Eigen::Index>(s * per_stage + i); };
    auto zeta = [&](std::size_t s, std::size_t i, std::size_t p) {
      return static_cast<Eigen::Index>(s * per_stage + I + i * n + p);
    };
    Eigen::Index row = 0;
    for (std::size_t s = 0; s < R; ++s) {
      const std::size_t k = depth + s;
      const Vector& Mn = Mk[k + 1];
      for (std::size_t i = 0; i < I; ++i) {
        lp.lo[gamma(s, i)] = 0.0;
        lp.hi[gamma(s, i)] = 1.0;
        const auto& st = sys.step(k, i);
        // constant part of Abar x_k + bbar when x_k is the fixed node state
        const Vector fixed = s == 0 ? Vector(st.Abar * x + st.bbar) : st.bbar;
        for (std::size_t p = 0; p < n; ++p) {
          const double Mp = Mn[p];
          const auto zc = zeta(s, i, p);
          // zeta <= gamma, -zeta <= gamma
          lp.A(row, zc) = 1.0;
          lp.A(row, gamma(s, i)) = -1.0;
          ++row;
          lp.A(row, zc) = -1.0;
          lp.A(row, gamma(s, i)) = -1.0;
          ++row;
          // +-(M zeta - Abar x_k - bbar) <= M (1 - gamma), scaled by 1/M
          for (int sign : {1, -1}) {
            lp.A(row, zc) = sign;
            lp.A(row, gamma(s, i)) = 1.0;
            if (s > 0) {
              const Vector& Mp_prev = Mk[k];
              for (std::size_t j = 0; j < I; ++j)
                for (std::size_t q = 0; q < n; ++q) {
                  const double a = st.Abar(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
                  if (a != 0.0) lp.A(row, zeta(s - 1, j, q)) -= sign * a * Mp_prev[q] / Mp;
                }
            }
            lp.b[row] = 1.0 + sign * fixed[p] / Mp;
            ++row;
          }
        }
      }
      for (std::size_t i = 0; i < I; ++i) lp.A(row, gamma(s, i)) = 1.0;
      lp.b[row] = 1.0;
      lp.sense[static_cast<std::size_t>(row)] = RowSense::eq;
      ++row;
    }
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t p = 0; p < n; ++p) lp.c[zeta(R - 1, i, p)] = w[p] * Mk[K1][p];
    return lp;
  }

 private:
  const SwitchedAffineSystem& sys_;
  Vector w_;
  const BigM& bigM_;
  const BranchBoundOptions& opt_;
  std::size_t common_from_ = 0;
  std::vector<Vector> lambda_;
  std::vector<double> beta_exact_;
  bool nonneg_ = false;
  std::vector<Vector> cone_w_;
  std::vector<double> cone_beta_;
};

struct Node {
  double bound;
  ModeSequence prefix;
  Vector x;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // larger bound first
    return a.prefix > b.prefix;                        // then lexicographically smaller
  }
};

}  // namespace detail

/// Exact optimum of c^T x_{K+1} over mode sequences by best-first branch and bound.
inline SolveResult solve_sequence(const SwitchedAffineSystem& sys, const Vector& c, Sense sense, const BigM& bigM,
                                  const BranchBoundOptions& opt = {}) {
  if (c.size() != static_cast<Eigen::Index>(sys.dim())) throw DimensionError("solve_sequence: c has wrong length");
  if (bigM.stage.size() != sys.num_stages() + 1) throw DimensionError("solve_sequence: BigM does not match the schedule");
  const Vector w = sense == Sense::max ? Vector(c) : Vector(-c);
  const std::size_t K1 = sys.num_stages(), I = sys.num_modes();
  detail::NodeBounder bounder(sys, w, bigM, opt);
  SolveResult res;
  auto& st = res.stats;

  double best = -std::numeric_limits<double>::infinity();
  ModeSequence best_seq;
  auto offer = [&](double v, const ModeSequence& s) {
    if (better_candidate(v, s, best, best_seq, tie_tolerance(v))) {
      best = v;
      best_seq = s;
    }
  };
  auto prunable = [&](double bound, const ModeSequence& prefix) {
    if (best_seq.empty()) return false;
    const double tol = tie_tolerance(best);
    if (bound < best - tol) return true;
    if (bound <= best + tol) {
      // Only a lexicographically smaller completion could still win the tie.
      const ModeSequence head(best_seq.begin(), best_seq.begin() + static_cast<long>(prefix.size()));
      return !(prefix < head);
    }
    return false;
  };
  auto want_lp = [&](std::size_t depth) {
    if (opt.lp == LpPolicy::never || bounder.exact_from(depth)) return false;
    if (opt.lp == LpPolicy::always) return true;
    return depth == 0 || bounder.lp_cost(depth) * opt.lp_cost_factor < bounder.subtree_cost(depth);
  };

  std::optional<double> root_lp;
  const double root = bounder.bound(0, sys.x0(), want_lp(0), st, &root_lp);
  st.root_bound = root;
  if (root_lp) st.root_lp_bound = sense == Sense::max ? *root_lp : -*root_lp;

  // Greedy dive for an early incumbent.
  {
    ModeSequence s;
    Vector x = sys.x0();
    for (std::size_t k = 0; k < K1; ++k) {
      double bb = -std::numeric_limits<double>::infinity();
      int pick = 0;
      Vector xp;
      for (std::size_t i = 0; i < I; ++i) {
        const auto& step = sys.step(k, i);
        Vector xi = step.Abar * x + step.bbar;
        const double b = k + 1 == K1 ? w.dot(xi) : bounder.bound(k + 1, xi, false, st);
        if (b > bb + tie_tolerance(b)) {
          bb = b;
          pick = static_cast<int>(i);
          xp = std::move(xi);
        }
      }
      s.push_back(pick);
      x = std::move(xp);
    }
    offer(w.dot(x), s);
  }

  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder> open;
  open.push({root, {}, sys.x0()});
  st.nodes = 1;
  while (!open.empty()) {
    detail::Node node = open.top();
    open.pop();
    if (prunable(node.bound, node.prefix)) {
      ++st.pruned;
      continue;
    }
    const std::size_t d = node.prefix.size();
    if (d + 1 == K1) {
      ModeSequence s = node.prefix;
      s.push_back(0);
      for (std::size_t i = 0; i < I; ++i) {
        s.back() = static_cast<int>(i);
        const auto& step = sys.step(d, i);
        offer(w.dot(step.Abar * node.x + step.bbar), s);
        ++st.leaves;
      }
      continue;
    }
    for (std::size_t i = 0; i < I; ++i) {
      detail::Node child;
      child.prefix = node.prefix;
      child.prefix.push_back(static_cast<int>(i));
      const auto& step = sys.step(d, i);
      child.x = step.Abar * node.x + step.bbar;
      child.bound = std::min(node.bound, bounder.bound(d + 1, child.x, want_lp(d + 1), st));
      ++st.nodes;
      if (st.nodes > opt.max_nodes) throw CapExceeded("solve_sequence: node limit reached", static_cast<double>(st.nodes));
      if (prunable(child.bound, child.prefix)) {
        ++st.pruned;
        continue;
      }
      open.push(std::move(child));
    }
  }

  res.sequence = best_seq;
  res.trajectory = sys.trajectory(best_seq);
  res.value = c.dot(res.trajectory.back());
  for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
    const Vector& M = bigM.stage[k];
    const Vector excess = res.trajectory[k].cwiseAbs() - M;
    if (excess.maxCoeff() > opt.bigM_check_tol * std::max(1.0, M.maxCoeff()))
      throw InternalInconsistency("solve_sequence: incumbent trajectory violates the big-M bound at stage " +
                                  std::to_string(k));
  }
  if (sense == Sense::min) st.root_bound = -st.root_bound;
  return res;
}

inline SolveResult solve_sequence(const SwitchedAffineSystem& sys, const Vector& c, Sense sense,
                                  const BranchBoundOptions& opt = {}) {
  return solve_sequence(sys, c, sense, compute_bigM(sys), opt);
}

/// Full big-M program of the problem (states, indicators and copies z_i^k) in LP-file form.
inline LinearProgram build_bigM_program(const SwitchedAffineSystem& sys, const Vector& c, Sense sense,
                                        const BigM& bigM) {
  const std::size_t K1 = sys.num_stages(), I = sys.num_modes(), n = sys.dim();
  // columns: x_k (k = 0..K+1), then per stage k: gamma_i^k, z_i^{k+1}
  const std::size_t nx = (K1 + 1) * n, per_stage = I + I * n;
  const auto cols = static_cast<Eigen::Index>(nx + K1 * per_stage);
  auto xcol = [&](std::size_t k, std::size_t p) { return static_cast<Eigen::Index>(k * n + p); };
  auto gcol = [&](std::size_t k, std::size_t i) { return static_cast<Eigen::Index>(nx + k * per_stage + i); };
  auto zcol = [&](std::size_t k, std::size_t i, std::size_t p) {
    return static_cast<Eigen::Index>(nx + k * per_stage + I + i * n + p);
  };
  std::vector<std::vector<std::pair<Eigen::Index, double>>> rows;
  std::vector<double> rhs;
  std::vector<RowSense> senses;
  auto add = [&](std::vector<std::pair<Eigen::Index, double>> r, RowSense s, double v) {
    rows.push_back(std::move(r));
    senses.push_back(s);
    rhs.push_back(v);
  };
  for (std::size_t p = 0; p < n; ++p) add({{xcol(0, p), 1.0}}, RowSense::eq, sys.x0()[p]);
  for (std::size_t k = 0; k < K1; ++k) {
    const Vector& M = bigM.M;
    std::vector<std::pair<Eigen::Index, double>> one;
    for (std::size_t i = 0; i < I; ++i) one.push_back({gcol(k, i), 1.0});
    add(one, RowSense::eq, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<std::pair<Eigen::Index, double>> sum{{xcol(k + 1, p), 1.0}};
      for (std::size_t i = 0; i < I; ++i) sum.push_back({zcol(k, i, p), -1.0});
      add(sum, RowSense::eq, 0.0);
    }
    for (std::size_t i = 0; i < I; ++i) {
      const auto& st = sys.step(k, i);
      for (std::size_t p = 0; p < n; ++p) {
        add({{zcol(k, i, p), 1.0}, {gcol(k, i), -M[p]}}, RowSense::le, 0.0);
        add({{zcol(k, i, p), 1.0}, {gcol(k, i), M[p]}}, RowSense::ge, 0.0);
        std::vector<std::pair<Eigen::Index, double>> up{{zcol(k, i, p), 1.0}, {gcol(k, i), M[p]}};
        std::vector<std::pair<Eigen::Index, double>> dn{{zcol(k, i, p), 1.0}, {gcol(k, i), -M[p]}};
        for (std::size_t q = 0; q < n; ++q) {
          const double a = st.Abar(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
          if (a == 0.0) continue;
          up.push_back({xcol(k, q), -a});
          dn.push_back({xcol(k, q), -a});
        }
        add(up, RowSense::le, st.bbar[p] + M[p]);
        add(dn, RowSense::ge, st.bbar[p] - M[p]);
      }
    }
  }
  LinearProgram lp;
  lp.A = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [j, a] : rows[r]) lp.A(static_cast<Eigen::Index>(r), j) += a;
  lp.b = Eigen::Map<const Vector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  lp.sense = senses;
  lp.c = Vector::Zero(cols);
  for (std::size_t p = 0; p < n; ++p) lp.c[xcol(K1, p)] = sense == Sense::max ? c[p] : -c[p];
  lp.lo = Vector::Zero(cols);
  lp.hi = Vector::Ones(cols);
  lp.names.resize(static_cast<std::size_t>(cols));
  lp.integer.assign(static_cast<std::size_t>(cols), false);
  for (std::size_t k = 0; k <= K1; ++k)
    for (std::size_t p = 0; p < n; ++p) {
      const auto j = xcol(k, p);
      lp.lo[j] = -bigM.M[p];
      lp.hi[j] = bigM.M[p];
      lp.names[j] = "x_" + std::to_string(k) + "_" + std::to_string(p);
    }
  for (std::size_t k = 0; k < K1; ++k)
    for (std::size_t i = 0; i < I; ++i) {
      lp.names[gcol(k, i)] = "g_" + std::to_string(k) + "_" + std::to_string(i);
      lp.integer[gcol(k, i)] = true;
      for (std::size_t p = 0; p < n; ++p) {
        const auto j = zcol(k, i, p);
        lp.lo[j] = -bigM.M[p];
        lp.hi[j] = bigM.M[p];
        lp.names[j] = "z_" + std::to_string(k + 1) + "_" + std::to_string(i) + "_" + std::to_string(p);
      }
    }
  return lp;
}

}  // namespace reachmo

#endif  // REACHMO_MILP_HPP

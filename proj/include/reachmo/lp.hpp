#ifndef REACHMO_LP_HPP
#define REACHMO_LP_HPP

// Dense bounded-variable primal simplex for the small relaxations that arise
// in branch and bound, plus a dual bound that stays valid for any multiplier
// vector, so an early stop or roundoff never yields an unsafe bound.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "reachmo/linalg.hpp"

namespace reachmo {

enum class RowSense { le, ge, eq };

/// max c^T x  s.t.  A x (<=, >=, =) b,  lo <= x <= hi  (all column bounds finite).
struct LinearProgram {
  Matrix A;
  Vector b;
  std::vector<RowSense> sense;
  Vector c;
  Vector lo;
  Vector hi;
  std::vector<std::string> names;  ///< optional column names for dumps
  std::vector<bool> integer;       ///< optional integrality flags for dumps

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0.0;  ///< primal objective at the final basis
  Vector x;
  Vector y;  ///< row multipliers with the sign convention of `lagrangian_bound`
  double bound = std::numeric_limits<double>::infinity();  ///< valid upper bound on the optimum
  int iterations = 0;
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 50000;
  int bland_after = 50;  ///< consecutive degenerate pivots before switching to Bland's rule
};

/// y^T b + sum_j max((c - A^T y)_j lo_j, (c - A^T y)_j hi_j), after projecting
/// y onto the sign cone of the rows. An upper bound on the LP optimum for any y.
inline double lagrangian_bound(const LinearProgram& lp, Vector y) {
  for (Eigen::Index i = 0; i < lp.rows(); ++i) {
    if (lp.sense[i] == RowSense::le) y[i] = std::max(y[i], 0.0);
    if (lp.sense[i] == RowSense::ge) y[i] = std::min(y[i], 0.0);
  }
  const Vector r = lp.c - lp.A.transpose() * y;
  double v = y.dot(lp.b);
  for (Eigen::Index j = 0; j < lp.cols(); ++j) v += std::max(r[j] * lp.lo[j], r[j] * lp.hi[j]);
  return v;
}

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    n_ = lp.cols();
    m_ = lp.rows();
    for (Eigen::Index j = 0; j < n_; ++j)
      if (!std::isfinite(lp.lo[j]) || !std::isfinite(lp.hi[j]) || lp.lo[j] > lp.hi[j])
        throw DomainError("lp: column bounds must be finite and ordered");
    build();
  }

  LpResult run() {
    LpResult res;
    if (n_art_ > 0) {
      Vector c1 = Vector::Zero(N_);
      for (Eigen::Index a = 0; a < n_art_; ++a) c1[n_ + m_ + a] = -1.0;
      set_cost(c1);
      const auto st = iterate(res.iterations);
      if (st == LpStatus::iteration_limit) return finish(res, st);
      if (objective() < -opt_.feas_tol * std::max(1.0, lp_.b.cwiseAbs().maxCoeff()))
        return finish(res, LpStatus::infeasible);
      for (Eigen::Index a = 0; a < n_art_; ++a) hi_[n_ + m_ + a] = 0.0;
    }
    Vector c2 = Vector::Zero(N_);
    c2.head(n_) = lp_.c;
    set_cost(c2);
    return finish(res, iterate(res.iterations));
  }

 private:
  void build() {
    // Columns: structural, one slack per row (A x + s = b), then artificials.
    Vector xN(n_);
    for (Eigen::Index j = 0; j < n_; ++j) xN[j] = std::abs(lp_.lo[j]) <= std::abs(lp_.hi[j]) ? lp_.lo[j] : lp_.hi[j];
    const Vector s = lp_.b - lp_.A * xN;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> art_rows;
    std::vector<double> art_sign;
    Vector slo(m_), shi(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      switch (lp_.sense[i]) {
        case RowSense::le: slo[i] = 0.0; shi[i] = inf; break;
        case RowSense::ge: slo[i] = -inf; shi[i] = 0.0; break;
        case RowSense::eq: slo[i] = 0.0; shi[i] = 0.0; break;
      }
      if (s[i] < slo[i] - opt_.feas_tol || s[i] > shi[i] + opt_.feas_tol) {
        art_rows.push_back(i);
        art_sign.push_back(s[i] > shi[i] ? 1.0 : -1.0);
      }
    }
    n_art_ = static_cast<Eigen::Index>(art_rows.size());
    N_ = n_ + m_ + n_art_;
    T_ = Matrix::Zero(m_, N_);
    lo_.resize(N_);
    hi_.resize(N_);
    val_ = Vector::Zero(N_);
    basis_.assign(m_, -1);
    is_basic_.assign(N_, -1);
    T_.leftCols(n_) = lp_.A;
    T_.middleCols(n_, m_).setIdentity();
    lo_.head(n_) = lp_.lo;
    hi_.head(n_) = lp_.hi;
    lo_.segment(n_, m_) = slo;
    hi_.segment(n_, m_) = shi;
    val_.head(n_) = xN;
    for (Eigen::Index i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      val_[n_ + i] = s[i];
    }
    for (Eigen::Index a = 0; a < n_art_; ++a) {
      const Eigen::Index i = art_rows[a], col = n_ + m_ + a;
      T_(i, col) = art_sign[a];
      lo_[col] = 0.0;
      hi_[col] = inf;
      // slack leaves the basis at its violated bound, the artificial absorbs the residual
      const double bound = s[i] > shi[i] ? shi[i] : slo[i];
      val_[n_ + i] = bound;
      val_[col] = (s[i] - bound) * art_sign[a];
      basis_[i] = col;
    }
    for (Eigen::Index i = 0; i < m_; ++i) is_basic_[basis_[i]] = i;
    // Bring the tableau to canonical form B^{-1} [A I Art]; only artificial rows have a
    // non-identity basis column, and it is +-e_i, so scaling the row suffices.
    for (Eigen::Index a = 0; a < n_art_; ++a) {
      const Eigen::Index i = art_rows[a];
      T_.row(i) *= art_sign[a];
    }
  }

  void set_cost(const Vector& c) {
    cost_ = c;
    d_ = c;
    for (Eigen::Index i = 0; i < m_; ++i) d_ -= c[basis_[i]] * T_.row(i).transpose();
    for (Eigen::Index i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  double objective() const { return cost_.dot(val_); }

  LpStatus iterate(int& iters) {
    int degenerate = 0;
    while (true) {
      if (iters >= opt_.max_iterations) return LpStatus::iteration_limit;
      const bool bland = degenerate >= opt_.bland_after;
      Eigen::Index enter = -1;
      double best = 0.0, dir = 0.0;
      for (Eigen::Index j = 0; j < N_; ++j) {
        if (is_basic_[j] >= 0 || lo_[j] == hi_[j]) continue;
        const double dj = d_[j];
        double score = 0.0, sgn = 0.0;
        if (dj > opt_.opt_tol && val_[j] < hi_[j]) {
          score = dj;
          sgn = 1.0;
        } else if (dj < -opt_.opt_tol && val_[j] > lo_[j]) {
          score = -dj;
          sgn = -1.0;
        }
        if (sgn == 0.0) continue;
        if (bland) {
          enter = j;
          dir = sgn;
          break;
        }
        if (score > best) {
          best = score;
          enter = j;
          dir = sgn;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      // Basic variable i moves at rate -dir * T(i, enter) per unit step.
      double step = dir > 0.0 ? hi_[enter] - val_[enter] : val_[enter] - lo_[enter];
      Eigen::Index leave_row = -1;
      double leave_alpha = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double alpha = -dir * T_(i, enter);
        if (std::abs(alpha) <= opt_.pivot_tol) continue;
        const Eigen::Index bj = basis_[i];
        double room;
        if (alpha > 0.0)
          room = std::isfinite(hi_[bj]) ? (hi_[bj] - val_[bj]) / alpha : std::numeric_limits<double>::infinity();
        else
          room = std::isfinite(lo_[bj]) ? (lo_[bj] - val_[bj]) / alpha : std::numeric_limits<double>::infinity();
        room = std::max(room, 0.0);
        const bool better = room < step - 1e-12 ||
                            (room <= step + 1e-12 && leave_row >= 0 &&
                             (bland ? bj < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha)));
        if (better || (leave_row < 0 && room <= step)) {
          step = room;
          leave_row = i;
          leave_alpha = alpha;
        }
      }
      if (!std::isfinite(step)) return LpStatus::unbounded;
      ++iters;
      degenerate = step <= 1e-12 ? degenerate + 1 : 0;

      for (Eigen::Index i = 0; i < m_; ++i) val_[basis_[i]] += -dir * T_(i, enter) * step;
      val_[enter] += dir * step;
      if (leave_row < 0) {  // bound flip of the entering column
        val_[enter] = dir > 0.0 ? hi_[enter] : lo_[enter];
        continue;
      }

      const Eigen::Index leave = basis_[leave_row];
      val_[leave] = leave_alpha > 0.0 ? hi_[leave] : lo_[leave];
      pivot(leave_row, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index j) {
    const double p = T_(r, j);
    T_.row(r) /= p;
    const Eigen::RowVectorXd pr = T_.row(r);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T_(i, j);
      if (f != 0.0) T_.row(i) -= f * pr;
    }
    const double dj = d_[j];
    if (dj != 0.0) d_ -= dj * pr.transpose();
    is_basic_[basis_[r]] = -1;
    basis_[r] = j;
    is_basic_[j] = r;
    T_.col(j).setZero();
    T_(r, j) = 1.0;
    d_[j] = 0.0;
  }

  LpResult& finish(LpResult& res, LpStatus st) {
    res.status = st;
    res.x = val_.head(n_);
    res.objective = lp_.c.dot(res.x);
    // Multipliers y^T = c_B^T B^{-1}; the slack block of the tableau is B^{-1}.
    Vector cB(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cB[i] = basis_[i] < n_ ? lp_.c[basis_[i]] : 0.0;
    res.y = T_.middleCols(n_, m_).transpose() * cB;
    if (st == LpStatus::infeasible) {
      res.bound = -std::numeric_limits<double>::infinity();
    } else {
      res.bound = lagrangian_bound(lp_, res.y);
      if (st == LpStatus::optimal) res.bound = std::max(res.bound, res.objective);
    }
    return res;
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  Eigen::Index n_ = 0, m_ = 0, n_art_ = 0, N_ = 0;
  Matrix T_;
  Vector lo_, hi_, val_, cost_, d_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> is_basic_;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp, const LpOptions& opt = {}) {
  if (lp.b.size() != lp.rows() || static_cast<Eigen::Index>(lp.sense.size()) != lp.rows() ||
      lp.c.size() != lp.cols() || lp.lo.size() != lp.cols() || lp.hi.size() != lp.cols())
    throw DimensionError("solve_lp: inconsistent problem dimensions");
  if (lp.rows() == 0) {
    LpResult res;
    res.status = LpStatus::optimal;
    res.x.resize(lp.cols());
    for (Eigen::Index j = 0; j < lp.cols(); ++j) res.x[j] = lp.c[j] >= 0.0 ? lp.hi[j] : lp.lo[j];
    res.objective = lp.c.dot(res.x);
    res.y = Vector();
    res.bound = res.objective;
    return res;
  }
  detail::BoundedSimplex s(lp, opt);
  return s.run();
}

/// CPLEX LP text format, for cross-checking with external solvers.
inline void write_lp_format(const LinearProgram& lp, std::ostream& os, const std::string& title = "") {
  auto name = [&](Eigen::Index j) {
    return static_cast<std::size_t>(j) < lp.names.size() ? lp.names[j] : "x" + std::to_string(j);
  };
  auto term = [&](double a, Eigen::Index j, bool first) {
    std::string s = a < 0 ? " - " : (first ? " " : " + ");
    os << s;
    if (std::abs(a) != 1.0) os << std::abs(a) << ' ';
    os << name(j);
  };
  os.precision(17);
  if (!title.empty()) os << "\\ " << title << '\n';
  os << "Maximize\n obj:";
  bool first = true;
  for (Eigen::Index j = 0; j < lp.cols(); ++j)
    if (lp.c[j] != 0.0) {
      term(lp.c[j], j, first);
      first = false;
    }
  if (first) os << " 0 " << name(0);
  os << "\nSubject To\n";
  for (Eigen::Index i = 0; i < lp.rows(); ++i) {
    os << " r" << i << ':';
    first = true;
    for (Eigen::Index j = 0; j < lp.cols(); ++j)
      if (lp.A(i, j) != 0.0) {
        term(lp.A(i, j), j, first);
        first = false;
      }
    if (first) os << " 0 " << name(0);
    os << (lp.sense[i] == RowSense::le ? " <= " : lp.sense[i] == RowSense::ge ? " >= " : " = ") << lp.b[i] << '\n';
  }
  os << "Bounds\n";
  for (Eigen::Index j = 0; j < lp.cols(); ++j) os << ' ' << lp.lo[j] << " <= " << name(j) << " <= " << lp.hi[j] << '\n';
  bool any_int = false;
  for (Eigen::Index j = 0; j < lp.cols(); ++j)
    if (static_cast<std::size_t>(j) < lp.integer.size() && lp.integer[j]) {
      if (!any_int) os << "Binaries\n";
      any_int = true;
      os << ' ' << name(j) << '\n';
    }
  os << "End\n";
}

}  // namespace reachmo

#endif  // REACHMO_LP_HPP

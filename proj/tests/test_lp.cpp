#include <catch_amalgamated.hpp>

#include <limits>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "reachmo/lp.hpp"

using namespace reachmo;
using Catch::Matchers::WithinAbs;

namespace {

// Optimum over all basic solutions: every choice of n active constraints among rows and bounds.
double vertex_oracle(const LinearProgram& lp, bool& feasible) {
  const int n = static_cast<int>(lp.cols()), m = static_cast<int>(lp.rows());
  std::vector<std::pair<Eigen::RowVectorXd, double>> planes;
  for (int i = 0; i < m; ++i) planes.push_back({lp.A.row(i), lp.b[i]});
  for (int j = 0; j < n; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
    e[j] = 1.0;
    planes.push_back({e, lp.lo[j]});
    planes.push_back({e, lp.hi[j]});
  }
  const int P = static_cast<int>(planes.size());
  double best = -std::numeric_limits<double>::infinity();
  feasible = false;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Matrix M(n, n);
      Vector r(n);
      for (int k = 0; k < n; ++k) {
        M.row(k) = planes[pick[k]].first;
        r[k] = planes[pick[k]].second;
      }
      Eigen::FullPivLU<Matrix> lu(M);
      if (lu.rank() < n) return;
      const Vector x = lu.solve(r);
      for (int j = 0; j < n; ++j)
        if (x[j] < lp.lo[j] - 1e-9 || x[j] > lp.hi[j] + 1e-9) return;
      for (int i = 0; i < m; ++i) {
        const double ax = lp.A.row(i).dot(x);
        if (lp.sense[i] == RowSense::le && ax > lp.b[i] + 1e-9) return;
        if (lp.sense[i] == RowSense::ge && ax < lp.b[i] - 1e-9) return;
        if (lp.sense[i] == RowSense::eq && std::abs(ax - lp.b[i]) > 1e-9) return;
      }
      feasible = true;
      best = std::max(best, lp.c.dot(x));
      return;
    }
    for (int p = start; p < P; ++p) {
      pick[depth] = p;
      rec(p + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LinearProgram random_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> S(0, 5);
  LinearProgram lp;
  lp.A = Matrix::NullaryExpr(m, n, [&]() { return U(rng); });
  lp.b = oracle::random_vector(rng, m, -0.5, 1.0);
  lp.c = oracle::random_vector(rng, n);
  lp.lo = Vector::Constant(n, -1.0);
  lp.hi = oracle::random_vector(rng, n, 0.0, 2.0);
  for (int i = 0; i < m; ++i) {
    const int s = S(rng);
    lp.sense.push_back(s < 3 ? RowSense::le : s < 5 ? RowSense::ge : RowSense::eq);
  }
  return lp;
}

}  // namespace

TEST_CASE("simplex on a textbook problem") {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, 0 <= x <= 3, 0 <= y <= 10
  LinearProgram lp;
  lp.A.resize(2, 2);
  lp.A << 1, 1, 1, 3;
  lp.b = Vector(2);
  lp.b << 4, 6;
  lp.sense = {RowSense::le, RowSense::le};
  lp.c = Vector(2);
  lp.c << 3, 2;
  lp.lo = Vector::Zero(2);
  lp.hi = Vector(2);
  lp.hi << 3, 10;
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK_THAT(r.objective, WithinAbs(11.0, 1e-12));
  CHECK_THAT(r.x[0], WithinAbs(3.0, 1e-12));
  CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-12));
  CHECK_THAT(r.bound, WithinAbs(11.0, 1e-9));
}

TEST_CASE("simplex detects infeasibility") {
  LinearProgram lp;
  lp.A.resize(2, 1);
  lp.A << 1, 1;
  lp.b = Vector(2);
  lp.b << 2, 1;
  lp.sense = {RowSense::ge, RowSense::le};
  lp.c = Vector::Ones(1);
  lp.lo = Vector::Zero(1);
  lp.hi = Vector::Constant(1, 5);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("simplex matches vertex enumeration on random problems") {
  std::mt19937_64 rng(99);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 3, m = 1 + trial % 4;
    const auto lp = random_lp(rng, n, m);
    bool feasible = false;
    const double ref = vertex_oracle(lp, feasible);
    const auto r = solve_lp(lp);
    if (!feasible) {
      CHECK(r.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(r.status == LpStatus::optimal);
    ++solved;
    CHECK_THAT(r.objective, WithinAbs(ref, 1e-8));
    CHECK(r.bound >= ref - 1e-9);
    CHECK(r.bound <= ref + 1e-7);
  }
  CHECK(solved > 100);
}

TEST_CASE("the Lagrangian bound is valid for any multipliers") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lp = random_lp(rng, 3, 3);
    bool feasible = false;
    const double ref = vertex_oracle(lp, feasible);
    if (!feasible) continue;
    const Vector y = oracle::random_vector(rng, 3, -2.0, 2.0);
    CHECK(lagrangian_bound(lp, y) >= ref - 1e-12);
  }
}

TEST_CASE("LP text dump") {
  LinearProgram lp;
  lp.A.resize(1, 2);
  lp.A << 1, -2;
  lp.b = Vector::Ones(1);
  lp.sense = {RowSense::le};
  lp.c = Vector::Ones(2);
  lp.lo = Vector::Zero(2);
  lp.hi = Vector::Ones(2);
  lp.names = {"g", "x"};
  lp.integer = {true, false};
  std::ostringstream os;
  write_lp_format(lp, os);
  const auto s = os.str();
  CHECK(s.find("Maximize") != std::string::npos);
  CHECK(s.find("r0: g - 2 x <= 1") != std::string::npos);
  CHECK(s.find("Binaries\n g\n") != std::string::npos);
}

#include <catch_amalgamated.hpp>

#include <array>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reference_moments.hpp"
#include "reachmo/moments.hpp"

using namespace reachmo;
using namespace refmom;

TEST_CASE("moment layout and labels") {
  CHECK(moment_dim(2) == 5);
  CHECK(moment_dim(3) == 9);
  CHECK(cov_index(3, 0, 0) == 3);
  CHECK(cov_index(3, 1, 0) == 4);
  CHECK(cov_index(3, 2, 2) == 8);
  const auto labels = moment_labels({"M", "P"});
  CHECK(labels == std::vector<std::string>{"E[M]", "E[P]", "V[M]", "Cov[M,P]", "V[P]"});
}

TEST_CASE("gene-expression moment matrices, coefficient by coefficient") {
  // Entries are linear in the rates: unit rate vectors isolate each coefficient exactly.
  const std::array<Params, 5> probes{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0.0236, 0.0503, 0.18, 0.0121}}};
  for (const auto& p : probes) {
    const auto net = fixture::gene(p.kr, p.gr, p.kp, p.gp);
    const auto lm = to_linear_model(net);
    const auto [A, B] = example2(p);
    CHECK(lm.A == A);
    CHECK(lm.B.col(0) == B);
    CHECK(lm.f.isZero(0.0));
    const auto on = build_moment_system(net, {1.0});
    const auto off = build_moment_system(net, {0.0});
    CHECK(on.first == A);
    CHECK(on.second == B);
    CHECK(off.second.isZero(0.0));
  }
}

TEST_CASE("fluorescent moment matrices match the hand-transcribed 8-state form") {
  // The reference form exchanges the maturation and degradation symbols relative to
  // the reaction list: compare with (gp, kf) swapped.
  const std::array<FluoParams, 6> probes{{{1, 0, 0, 0, 0},
                                          {0, 1, 0, 0, 0},
                                          {0, 0, 1, 0, 0},
                                          {0, 0, 0, 1, 0},
                                          {0, 0, 0, 0, 1},
                                          {0.0236, 0.0503, 178.398, 0.0121, 0.0212}}};
  auto net = fixture::load("fluorescent_2in.json");
  for (const auto& p : probes) {
    net.reactions[0].rate = p.kr;
    net.reactions[1].rate = p.gr;
    net.reactions[2].rate = p.kp;
    net.reactions[3].rate = p.gp;
    net.reactions[4].rate = p.kf;
    net.reactions[5].rate = p.gp;
    const FluoParams swapped{p.kr, p.gr, p.kp, p.kf, p.gp};
    for (const auto& mode : enumerate_modes(net).modes) {
      const auto [A9, b9] = build_moment_system(net, mode);
      REQUIRE(A9.rows() == 9);
      const auto [A, b] = reduce_poisson_mrna(A9, b9);
      const auto [Aref, bref] = fluorescent8(swapped, mode[0], mode[1]);
      // unit probes are exact; the physical probe differs only by summation order
      const double tol = 4 * std::numeric_limits<double>::epsilon() * Aref.cwiseAbs().maxCoeff();
      CHECK((A - Aref).cwiseAbs().maxCoeff() <= tol);
      CHECK((b - bref).cwiseAbs().maxCoeff() <= tol);
    }
  }
}

TEST_CASE("pure birth has unit mean and variance slope") {
  const auto [A, b] = build_moment_system(fixture::birth(2.5), {});
  CHECK(A.isZero(0.0));
  CHECK(b == Vector::Constant(2, 2.5));
}

TEST_CASE("control classification") {
  CHECK(classify_control(fixture::load("gene_expression.json")) == ControlClass::linear);
  CHECK(classify_control(fixture::load("fluorescent_2in.json")) == ControlClass::switched_affine);
  CHECK(classify_control(fixture::load("fluorescent_1in.json")) == ControlClass::linear);
  CHECK(classify_control(fixture::birth(1.0)) == ControlClass::linear);

  const auto fl = fixture::load("fluorescent_1in.json");
  const auto sys = to_switched_system(fl);
  for (std::size_t i = 1; i < sys.num_modes(); ++i) CHECK(sys.A()[i] == sys.A()[0]);
}

TEST_CASE("switched moment systems") {
  const auto gene = to_switched_system(fixture::load("gene_expression.json"));
  CHECK(gene.num_modes() == 2);
  CHECK(gene.num_stages() == 12);
  CHECK(gene.x0().isZero(0.0));
  CHECK(gene.b()[0][0] == 0.0);
  CHECK(gene.b()[0][2] == 0.0);

  const auto fl = to_switched_system(fixture::load("fluorescent_2in.json"));
  CHECK(fl.num_modes() == 4);
  CHECK(fl.dim() == 9);
}

TEST_CASE("non-closing networks are routed away") {
  CHECK_THROWS_AS(to_switched_system(fixture::load("saturated.json")), NonClosedMomentsError);
  auto dimer = fixture::birth(1.0);
  dimer.reactions[0].consumed = {2};
  CHECK_THROWS_AS(build_moment_system(dimer, {}), NonClosedMomentsError);
}

TEST_CASE("covariance stays positive semidefinite along trajectories") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> rate(0.01, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto net = fixture::load("fluorescent_2in.json");
    for (auto& r : net.reactions) r.rate = rate(rng);
    net.initial_distribution = {{{2, 0, 1}, 0.5}, {{0, 3, 0}, 0.5}};
    net.initial_state.reset();
    validate(net);
    const auto sys = to_switched_system(net);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(sys.num_modes()) - 1);
    ModeSequence seq(sys.num_stages());
    for (auto& s : seq) s = pick(rng);
    for (const auto& x : sys.trajectory(seq)) {
      Matrix S(3, 3);
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) S(a, c) = x[cov_index(3, a, c)];
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("initial moments of a distribution") {
  auto net = fixture::birth(1.0);
  net.initial_state.reset();
  net.initial_distribution = {{{0}, 0.5}, {{2}, 0.5}};
  const Vector x = initial_moments(net);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 1.0);
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reachmo/fsp.hpp"

using namespace reachmo;
using Catch::Approx;

namespace {

ReactionNetwork gene_net() { return fixture::load("gene_expression.json"); }
ReactionNetwork saturated_net() { return fixture::load("saturated.json"); }

ModeSequence random_sequence(std::mt19937_64& rng, std::size_t K1, int I) {
  std::uniform_int_distribution<int> pick(0, I - 1);
  ModeSequence s(K1);
  for (auto& i : s) i = pick(rng);
  return s;
}

double poisson(double lambda, int j) { return std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0)); }

}  // namespace

TEST_CASE("truncation enumerates row-major with the last species fastest") {
  Truncation J({3, 3});
  CHECK(J.size() == 9);
  CHECK(J.index({2, 1}) == 7);
  CHECK(J.state(7) == State{2, 1});
  CHECK(J.state(1) == State{0, 1});
  for (std::size_t j = 0; j < J.size(); ++j) CHECK(J.index(J.state(j)) == j);
  CHECK_FALSE(J.contains({3, 0}));
  CHECK_FALSE(J.contains({0, -1}));
  CHECK_THROWS_AS(J.index({3, 0}), DomainError);

  CHECK(build_truncation({6, 40}).size() == 240);
  CHECK(Truncation({12, 80}).includes(Truncation({6, 40})));
  CHECK_FALSE(Truncation({6, 40}).includes(Truncation({12, 3})));
  CHECK_THROWS_AS(Truncation({1000, 1000, 10}), CapExceeded);
  CHECK_THROWS_AS(Truncation({0, 4}), DomainError);
}

TEST_CASE("birth chain generator") {
  const auto net = fixture::birth(2.5);
  const auto F = build_generator(net, {}, Truncation({2}));
  const Matrix D(F);
  Matrix expect(2, 2);
  expect << -2.5, 0.0, 2.5, -2.5;
  CHECK(D == expect);
}

TEST_CASE("generator balance: interior columns conserve mass, boundary columns leak") {
  const auto net = gene_net();
  const Truncation J({6, 40});
  for (const InputVector mode : {InputVector{0.0}, InputVector{1.0}}) {
    const Matrix F(build_generator(net, mode, J));
    REQUIRE((F - Matrix(F.diagonal().asDiagonal())).minCoeff() >= 0.0);
    for (std::size_t j = 0; j < J.size(); ++j) {
      const State z = J.state(j);
      const double colsum = F.col(static_cast<Eigen::Index>(j)).sum();
      const double leak = (z[0] == 5 ? 0.0236 * mode[0] : 0.0) + (z[1] == 39 ? 0.18 * z[0] : 0.0);
      CHECK(colsum == Approx(-leak).margin(1e-14));
    }
  }
}

TEST_CASE("self-loops leave the generator unchanged") {
  auto net = fixture::birth(1.0);
  Reaction cat;
  cat.name = "catalytic";
  cat.consumed = {1};
  cat.produced = {1};
  cat.rate = 5.0;
  net.reactions.push_back(cat);
  CHECK(Matrix(build_generator(net, {}, Truncation({4}))) == Matrix(build_generator(fixture::birth(1.0), {}, Truncation({4}))));
}

TEST_CASE("birth chain propagates to a truncated Poisson law") {
  auto net = fixture::birth(1.3, 2.0);
  for (std::size_t thr : {std::size_t{512}, std::size_t{0}}) {
    FspOptions opt;
    opt.dense_threshold = thr;
    FspModel m(net, Truncation({8}), opt);
    const Vector P = m.propagate({0});
    for (int j = 0; j < 8; ++j) CHECK(P[j] == Approx(poisson(2.6, j)).epsilon(1e-12));
  }
}

TEST_CASE("uniformization agrees with the dense exponential") {
  const auto net = gene_net();
  FspOptions sparse;
  sparse.dense_threshold = 0;
  FspModel dense(net, Truncation({6, 40})), uni(net, Truncation({6, 40}), sparse);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const auto s = random_sequence(rng, 12, 2);
    CHECK((dense.propagate(s) - uni.propagate(s)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("initial law outside the box is rejected") {
  auto net = fixture::load("conversion_chain.json");
  CHECK_THROWS_AS(FspModel(net, Truncation({3, 4})), PreconditionError);
  CHECK_NOTHROW(FspModel(net, Truncation({4, 4})));
}

TEST_CASE("retained mass is non-increasing along stages") {
  FspModel m(gene_net(), Truncation({6, 40}));
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    PropagationAudit audit;
    const auto xs = m.propagate_all(random_sequence(rng, 12, 2), &audit);
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) CHECK(xs[k + 1].sum() <= xs[k].sum() + 1e-14);
    CHECK(audit.most_negative >= -1e-12);
  }
}

TEST_CASE("mass-conserving chain certifies with zero loss") {
  FspModel m(fixture::load("conversion_chain.json"), Truncation({4, 4}));
  const auto cert = certify_mass(m, 1e-6);
  CHECK(cert.epsilon == Approx(0.0).margin(1e-12));
  CHECK(cert.certified);
  CHECK(m.epsilon.has_value());
}

TEST_CASE("saturated certificate matches exhaustive enumeration") {
  FspModel m(saturated_net(), Truncation({6, 40}));
  REQUIRE(m.num_stages() == 12);
  // Oracle: retained mass of every one of the 4096 sequences.
  double worst = 2.0;
  ModeSequence worst_seq;
  for (unsigned code = 0; code < 4096u; ++code) {
    ModeSequence s(12);
    for (std::size_t k = 0; k < 12; ++k) s[k] = static_cast<int>((code >> (11 - k)) & 1u);
    const double mass = m.propagate(s).sum();
    if (mass < worst - 1e-15) {
      worst = mass;
      worst_seq = s;
    }
  }
  const auto cert = certify_mass(m, 1e-3);
  CHECK(cert.epsilon == Approx(1.0 - worst).epsilon(1e-9));
  CHECK(cert.minimizing_sequence == worst_seq);
  CHECK(cert.minimizing_sequence == ModeSequence(12, 1));
  CHECK(cert.epsilon == Approx(8.3467e-4).epsilon(1e-4));
  CHECK(cert.certified);
  CHECK(*m.epsilon == cert.epsilon);
}

TEST_CASE("a tiny box fails certification") {
  FspModel m(saturated_net(), Truncation({2, 4}));
  const auto cert = certify_mass(m, 1e-3);
  CHECK(cert.epsilon > 0.1);
  CHECK_FALSE(cert.certified);
  CHECK_FALSE(m.epsilon.has_value());
}

TEST_CASE("truncated probabilities sit below a larger reference within epsilon") {
  FspModel m(saturated_net(), Truncation({6, 40}));
  const auto cert = certify_mass(m, 1e-2);
  FspModel ref(saturated_net(), Truncation({12, 80}));
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const auto rep = error_bound_check(m, random_sequence(rng, 12, 2), ref, cert.epsilon);
    CHECK(rep.lower_holds);
    CHECK(rep.l1_holds);
    CHECK(rep.l1_diff > 0.0);
  }
  CHECK_THROWS_AS(error_bound_check(ref, ModeSequence(12, 0), m), PreconditionError);
}

TEST_CASE("retained mass grows with the box") {
  const auto net = gene_net();
  const ModeSequence s(12, 1);
  double prev = 0.0;
  for (std::int64_t b : {3, 4, 6, 8}) {
    FspModel m(net, Truncation({b, 10 * b}));
    const double mass = m.propagate(s).sum();
    CHECK(mass >= prev);
    prev = mass;
  }
}

TEST_CASE("conditional outputs") {
  Vector P(3);
  P << 0.2, 0.3, 0.4;
  Vector l1(3), l2(3);
  l1 << 0, 1, 2;
  l2 << 0, 1, 4;
  const auto o = conditional_outputs(P, l1, l2);
  CHECK(o.mass == Approx(0.9));
  CHECK(o.ybar1 == Approx(1.1));
  CHECK(o.yhat1 == Approx(1.1 / 0.9));
  CHECK(o.yhat2 == Approx(1.9 / 0.9));
  CHECK_THROWS_AS(conditional_outputs(Vector::Zero(3), l1, l2), DomainError);
  CHECK_THROWS_AS(conditional_outputs(P, Vector::Zero(2), l2), DimensionError);

  const Truncation J({2, 3});
  const Vector w = species_weights(J, 1, 2);
  CHECK(w[J.index({1, 2})] == 4.0);
  CHECK(w[J.index({1, 0})] == 0.0);
}

TEST_CASE("restriction to a sub-box") {
  const Truncation small({2, 2}), big({3, 3});
  Vector P(9);
  for (int j = 0; j < 9; ++j) P[j] = j;
  const Vector r = restrict_to(small, big, P);
  CHECK(r == (Vector(4) << 0, 1, 3, 4).finished());
  CHECK_THROWS_AS(restrict_to(big, small, r), PreconditionError);
}

TEST_CASE("mass-action certificate on the same box") {
  FspModel m(gene_net(), Truncation({6, 40}));
  const auto cert = certify_mass(m, 1e-3);
  CHECK(cert.epsilon == Approx(1.0 - m.propagate(ModeSequence(12, 1)).sum()).epsilon(1e-9));
  CHECK_FALSE(cert.certified);
}

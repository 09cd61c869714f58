#ifndef REACHMO_SSA_HPP
#define REACHMO_SSA_HPP

// Direct-method stochastic simulation of the controlled network under a
// fixed mode sequence. Per-run streams: mt19937_64 seeded with
// splitmix64(splitmix64(seed) + run), so results do not depend on the worker count.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "reachmo/model.hpp"
#include "reachmo/moments.hpp"
#include "reachmo/parallel.hpp"
#include "reachmo/switched.hpp"

namespace reachmo {

struct Trajectory {
  std::vector<double> times;   ///< 0, then each event time
  std::vector<State> states;   ///< state at times[j] (after the event)
  ModeSequence modes;
  std::uint64_t seed = 0;
  std::size_t event_count = 0;

  const State& terminal() const { return states.back(); }
  std::size_t events() const { return event_count; }
};

struct SsaOptions {
  bool record = true;                   ///< keep every event; otherwise only start and end
  std::size_t max_events = 100'000'000;  ///< per run
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) { return splitmix64(splitmix64(seed) + run); }

/// One sample path on the network schedule. Waiting times that cross a stage
/// boundary are discarded and redrawn from the boundary.
inline Trajectory simulate(const ReactionNetwork& net, const ModeSequence& seq, std::uint64_t seed,
                           const SsaOptions& opt = {}) {
  const auto instants = net.schedule.instants();
  if (seq.size() + 1 != instants.size()) throw DimensionError("simulate: sequence length differs from the number of stages");
  const auto modes = enumerate_modes(net);
  for (int i : seq)
    if (i < 0 || static_cast<std::size_t>(i) >= modes.size()) throw DomainError("simulate: mode index out of range");

  std::mt19937_64 rng(seed);
  Trajectory tr;
  tr.modes = seq;
  tr.seed = seed;

  const auto law = net.initial_law();
  State z;
  if (law.size() == 1) {
    z = law[0].state;
  } else {
    std::vector<double> w;
    for (const auto& ws : law) w.push_back(ws.prob);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    z = law[pick(rng)].state;
  }
  tr.times.push_back(instants.front());
  tr.states.push_back(z);

  std::vector<std::vector<int>> nus;
  for (const auto& r : net.reactions) nus.push_back(r.net_change());
  std::vector<double> a(net.reactions.size());
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t events = 0;

  double t = instants.front();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto& mode = modes[static_cast<std::size_t>(seq[k])];
    const double end = instants[k + 1];
    while (true) {
      double a0 = 0.0;
      for (std::size_t r = 0; r < a.size(); ++r) {
        a[r] = propensity(net.reactions[r], z, mode);
        a0 += a[r];
      }
      if (!std::isfinite(a0)) throw DomainError("simulate: propensity overflow");
      if (a0 <= 0.0) break;
      const double tau = expo(rng) / a0;
      if (t + tau >= end) break;
      t += tau;
      const double target = unif(rng) * a0;
      std::size_t r = 0;
      double acc = a[0];
      while (acc <= target && r + 1 < a.size()) acc += a[++r];
      while (a[r] == 0.0 && r > 0) --r;  // guard against rounding past the last positive channel
      for (std::size_t s = 0; s < z.size(); ++s) z[s] += nus[r][s];
      if (++events > opt.max_events) throw CapExceeded("simulate: event limit reached", static_cast<double>(events));
      if (opt.record) {
        tr.times.push_back(t);
        tr.states.push_back(z);
      }
    }
    t = end;
  }
  tr.event_count = events;
  if (!opt.record || tr.times.back() != t) {
    tr.times.push_back(t);
    tr.states.push_back(z);
  }
  return tr;
}

/// Terminal states of `runs` independent paths (run j uses run_seed(seed, j)).
inline std::vector<State> terminal_states(const ReactionNetwork& net, const ModeSequence& seq, std::size_t runs,
                                          std::uint64_t seed, unsigned threads = 0) {
  std::vector<State> out(runs);
  SsaOptions opt;
  opt.record = false;
  parallel_for(runs, [&](std::size_t j) { out[j] = simulate(net, seq, run_seed(seed, j), opt).terminal(); }, threads);
  return out;
}

/// Sample means and covariances in moment-vector layout, with normal-approximation CIs.
struct MomentEstimate {
  std::vector<std::string> labels;
  Vector value;
  Vector half_width;
  double level = 0.99;
  std::size_t runs = 0;

  bool covers(Eigen::Index i, double x) const { return std::abs(x - value[i]) <= half_width[i]; }
};

inline MomentEstimate moments_of_samples(const std::vector<State>& zs, const std::vector<std::string>& species,
                                         double level = 0.99) {
  const std::size_t N = zs.size(), S = species.size();
  if (N < 2) throw DomainError("monte_carlo_moments: need at least two runs");
  const double n = static_cast<double>(N);
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  Matrix X(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(S));
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t s = 0; s < S; ++s) X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) = static_cast<double>(zs[j][s]);
  const Vector mean = X.colwise().mean();
  const Matrix C = X.rowwise() - mean.transpose();

  MomentEstimate e;
  e.labels = moment_labels(species);
  e.level = level;
  e.runs = N;
  e.value = Vector::Zero(static_cast<Eigen::Index>(moment_dim(S)));
  e.half_width = e.value;
  for (std::size_t s = 0; s < S; ++s) {
    const auto si = static_cast<Eigen::Index>(s);
    e.value[si] = mean[si];
    e.half_width[si] = z * std::sqrt(C.col(si).squaredNorm() / (n - 1.0) / n);
  }
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = a; b < S; ++b) {
      const auto i = static_cast<Eigen::Index>(cov_index(S, a, b));
      const Vector prod = C.col(static_cast<Eigen::Index>(a)).cwiseProduct(C.col(static_cast<Eigen::Index>(b)));
      const double cov = prod.sum() / (n - 1.0);
      const double m22 = prod.squaredNorm() / n;
      e.value[i] = cov;
      e.half_width[i] = z * std::sqrt(std::max(0.0, m22 - cov * cov) / n);
    }
  return e;
}

inline MomentEstimate monte_carlo_moments(const ReactionNetwork& net, const ModeSequence& seq, std::size_t runs,
                                          std::uint64_t seed, double level = 0.99, unsigned threads = 0) {
  if (runs < 2) throw DomainError("monte_carlo_moments: need at least two runs");
  return moments_of_samples(terminal_states(net, seq, runs, seed, threads), net.species, level);
}

}  // namespace reachmo

#endif  // REACHMO_SSA_HPP

#ifndef REACHMO_FSP_HPP
#define REACHMO_FSP_HPP

// Finite state projection of the controlled master equation: box truncation,
// per-mode substochastic generators, propagation of the truncated
// probability vector and the worst-case retained-mass certificate.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "reachmo/milp.hpp"
#include "reachmo/model.hpp"
#include "reachmo/switched.hpp"

namespace reachmo {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Box {z : 0 <= z_s < bounds_s}, enumerated row-major (last species fastest).
class Truncation {
 public:
  Truncation() = default;
  explicit Truncation(std::vector<std::int64_t> bounds, double cap = 1e6) : bounds_(std::move(bounds)) {
    if (bounds_.empty()) throw DimensionError("truncation: no species");
    double total = 1.0;
    for (auto b : bounds_) {
      if (b < 1) throw DomainError("truncation: bounds must be >= 1");
      total *= static_cast<double>(b);
    }
    if (total > cap) throw CapExceeded("truncation: " + std::to_string(total) + " states exceed the cap", total);
    strides_.assign(bounds_.size(), 1);
    for (std::size_t s = bounds_.size() - 1; s-- > 0;) strides_[s] = strides_[s + 1] * bounds_[s + 1];
    size_ = static_cast<std::size_t>(total);
  }

  std::size_t size() const { return size_; }
  std::size_t species() const { return bounds_.size(); }
  const std::vector<std::int64_t>& bounds() const { return bounds_; }

  bool contains(const State& z) const {
    if (z.size() != bounds_.size()) return false;
    for (std::size_t s = 0; s < z.size(); ++s)
      if (z[s] < 0 || z[s] >= bounds_[s]) return false;
    return true;
  }

  std::size_t index(const State& z) const {
    if (!contains(z)) throw DomainError("truncation: state outside the box");
    std::int64_t j = 0;
    for (std::size_t s = 0; s < z.size(); ++s) j += z[s] * strides_[s];
    return static_cast<std::size_t>(j);
  }

  State state(std::size_t j) const {
    if (j >= size_) throw DomainError("truncation: index out of range");
    State z(bounds_.size());
    auto r = static_cast<std::int64_t>(j);
    for (std::size_t s = 0; s < bounds_.size(); ++s) {
      z[s] = r / strides_[s];
      r %= strides_[s];
    }
    return z;
  }

  /// True when every state of `inner` lies in this box.
  bool includes(const Truncation& inner) const {
    if (inner.bounds_.size() != bounds_.size()) return false;
    for (std::size_t s = 0; s < bounds_.size(); ++s)
      if (inner.bounds_[s] > bounds_[s]) return false;
    return true;
  }

 private:
  std::vector<std::int64_t> bounds_;
  std::vector<std::int64_t> strides_;
  std::size_t size_ = 0;
};

inline Truncation build_truncation(const std::vector<std::int64_t>& bounds, double cap = 1e6) {
  return Truncation(bounds, cap);
}

/// [F]_J for one input vector: column j holds the outflow of state z^j,
/// including reactions that leave the box (diagonal only).
inline SparseMatrix build_generator(const ReactionNetwork& net, const InputVector& mode, const Truncation& J) {
  if (J.species() != net.num_species()) throw DimensionError("build_generator: truncation does not match species");
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::vector<int>> nus;
  for (const auto& r : net.reactions) nus.push_back(r.net_change());
  for (std::size_t j = 0; j < J.size(); ++j) {
    const State z = J.state(j);
    double out = 0.0;
    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
      const double a = propensity(net.reactions[r], z, mode);
      if (a == 0.0) continue;
      out += a;
      State y = z;
      for (std::size_t s = 0; s < y.size(); ++s) y[s] += nus[r][s];
      if (y == z) {
        out -= a;  // self-loop: no change of state
        continue;
      }
      if (J.contains(y)) trip.emplace_back(static_cast<int>(J.index(y)), static_cast<int>(j), a);
    }
    trip.emplace_back(static_cast<int>(j), static_cast<int>(j), -out);
  }
  const auto n = static_cast<Eigen::Index>(J.size());
  SparseMatrix F(n, n);
  F.setFromTriplets(trip.begin(), trip.end());
  F.makeCompressed();
  return F;
}

/// Probability vector of the initial law on J; mass outside the box is rejected.
inline Vector initial_probability(const ReactionNetwork& net, const Truncation& J) {
  Vector p = Vector::Zero(static_cast<Eigen::Index>(J.size()));
  for (const auto& ws : net.initial_law()) {
    if (ws.prob == 0.0) continue;
    if (!J.contains(ws.state)) throw PreconditionError("initial law puts mass outside the truncation box");
    p[static_cast<Eigen::Index>(J.index(ws.state))] += ws.prob;
  }
  return p;
}

struct PropagationAudit {
  std::size_t clamped = 0;   ///< entries in [-1e-12, 0) set to zero
  double most_negative = 0.0;  ///< most negative entry seen before clamping
};

struct FspOptions {
  std::size_t dense_threshold = 512;  ///< |J| up to which stage maps are formed densely
  double uniformization_chunk = 50.0;  ///< max Lambda * h per uniformization sub-step
};

/// x(t) = exp(F t) x by uniformization; F must be a substochastic generator.
inline Vector expm_action_uniformized(const SparseMatrix& F, const Vector& x, double t, double chunk = 50.0) {
  double Lambda = 0.0;
  for (Eigen::Index j = 0; j < F.outerSize(); ++j) Lambda = std::max(Lambda, -F.coeff(j, j));
  if (Lambda == 0.0 || t == 0.0) return x;
  Lambda *= 1.0 + 1e-12;
  const int pieces = std::max(1, static_cast<int>(std::ceil(Lambda * t / chunk)));
  const double h = t / pieces, lh = Lambda * h;
  Vector v = x;
  for (int piece = 0; piece < pieces; ++piece) {
    Vector term = v;
    double weight = std::exp(-lh);
    Vector acc = weight * term;
    double total = weight;
    for (int k = 1; k < 100000; ++k) {
      term = term + (F * term) / Lambda;
      weight *= lh / k;
      acc += weight * term;
      total += weight;
      if (k > lh && (weight < 1e-20 * total || 1.0 - total < 1e-17)) break;
    }
    v = acc;
  }
  return v;
}

class FspModel {
 public:
  FspModel(const ReactionNetwork& net, Truncation J, const FspOptions& opt = {})
      : J_(std::move(J)), opt_(opt), modes_(enumerate_modes(net)), instants_(net.schedule.instants()) {
    for (const auto& m : modes_.modes) generators_.push_back(build_generator(net, m, J_));
    p0_ = initial_probability(net, J_);
  }

  const Truncation& truncation() const { return J_; }
  const ModeSet& modes() const { return modes_; }
  const std::vector<SparseMatrix>& generators() const { return generators_; }
  const Vector& p0() const { return p0_; }
  const std::vector<double>& instants() const { return instants_; }
  std::size_t num_stages() const { return instants_.size() - 1; }
  std::size_t size() const { return J_.size(); }
  bool dense() const { return J_.size() <= opt_.dense_threshold; }

  std::optional<double> epsilon;  ///< certified mass loss, if certified
  std::optional<ModeSequence> worst_sequence;

  /// exp([F_i]_J (t_{k+1} - t_k)), cached per (mode, duration).
  const Matrix& stage_map(std::size_t k, std::size_t i) const {
    if (!dense()) throw UnsupportedError("stage maps are only formed for |J| <= dense_threshold");
    const double tau = instants_[k + 1] - instants_[k];
    auto key = std::make_pair(i, tau);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, expm(Matrix(generators_[i]), tau)).first;
    return it->second;
  }

  /// The truncated probability dynamics as a switched (linear) system.
  SwitchedAffineSystem probability_system() const {
    std::vector<std::vector<AffineStep>> steps(num_stages());
    for (std::size_t k = 0; k < num_stages(); ++k)
      for (std::size_t i = 0; i < modes_.size(); ++i)
        steps[k].push_back({stage_map(k, i), Vector::Zero(static_cast<Eigen::Index>(size()))});
    return SwitchedAffineSystem::from_steps(std::move(steps), p0_, instants_);
  }

  /// P̄_J at every stage boundary t_0 .. t_{K+1}.
  std::vector<Vector> propagate_all(const ModeSequence& seq, PropagationAudit* audit = nullptr) const {
    if (seq.size() != num_stages()) throw DimensionError("propagate: sequence length differs from K+1");
    std::vector<Vector> out{p0_};
    for (std::size_t k = 0; k < seq.size(); ++k) {
      if (seq[k] < 0 || static_cast<std::size_t>(seq[k]) >= modes_.size()) throw DomainError("propagate: bad mode");
      Vector p = dense() ? Vector(stage_map(k, seq[k]) * out.back())
                         : expm_action_uniformized(generators_[seq[k]], out.back(),
                                                   instants_[k + 1] - instants_[k], opt_.uniformization_chunk);
      for (Eigen::Index j = 0; j < p.size(); ++j)
        if (p[j] < 0.0) {
          if (audit) {
            ++audit->clamped;
            audit->most_negative = std::min(audit->most_negative, p[j]);
          }
          p[j] = 0.0;
        }
      out.push_back(std::move(p));
    }
    return out;
  }

  Vector propagate(const ModeSequence& seq, PropagationAudit* audit = nullptr) const {
    return propagate_all(seq, audit).back();
  }

 private:
  Truncation J_;
  FspOptions opt_;
  ModeSet modes_;
  std::vector<double> instants_;
  std::vector<SparseMatrix> generators_;
  Vector p0_;
  mutable std::map<std::pair<std::size_t, double>, Matrix> cache_;
};

struct MassCertificate {
  double epsilon = 1.0;
  bool certified = false;
  ModeSequence minimizing_sequence;
  BranchBoundStats stats;
};

/// epsilon = 1 - min over sequences of the retained mass, by the MILP with c = 1, M = 1.
inline MassCertificate certify_mass(FspModel& model, double eps_target, const BranchBoundOptions& opt = {}) {
  const auto sys = model.probability_system();
  const auto n = static_cast<Eigen::Index>(model.size());
  const Vector ones = Vector::Ones(n);
  const auto sol = solve_sequence(sys, ones, Sense::min, compute_bigM(sys, ones), opt);
  MassCertificate out;
  out.epsilon = std::clamp(1.0 - sol.value, 0.0, 1.0);
  out.certified = out.epsilon <= eps_target && out.epsilon < 1.0;
  out.minimizing_sequence = sol.sequence;
  out.stats = sol.stats;
  if (out.certified) {
    model.epsilon = out.epsilon;
    model.worst_sequence = sol.sequence;
  } else {
    model.epsilon.reset();
  }
  return out;
}

/// l̄ with entries z_s^power for each state of the box.
inline Vector species_weights(const Truncation& J, std::size_t species, int power) {
  if (species >= J.species()) throw DimensionError("species_weights: species out of range");
  Vector l(static_cast<Eigen::Index>(J.size()));
  for (std::size_t j = 0; j < J.size(); ++j)
    l[static_cast<Eigen::Index>(j)] = std::pow(static_cast<double>(J.state(j)[species]), power);
  return l;
}

struct ConditionalOutputs {
  double ybar1 = 0.0, ybar2 = 0.0;  ///< l̄^T P̄
  double mass = 0.0;                ///< 1^T P̄
  double yhat1 = 0.0, yhat2 = 0.0;  ///< conditioned on staying in J
};

inline ConditionalOutputs conditional_outputs(const Vector& P, const Vector& l1, const Vector& l2) {
  if (l1.size() != P.size() || l2.size() != P.size()) throw DimensionError("conditional_outputs: length mismatch");
  ConditionalOutputs o;
  o.ybar1 = l1.dot(P);
  o.ybar2 = l2.dot(P);
  o.mass = P.sum();
  if (!(o.mass > 0.0)) throw DomainError("conditional_outputs: zero retained mass, conditional moments undefined");
  o.yhat1 = o.ybar1 / o.mass;
  o.yhat2 = o.ybar2 / o.mass;
  return o;
}

inline ConditionalOutputs conditional_outputs(const FspModel& model, const ModeSequence& seq, const Vector& l1,
                                              const Vector& l2) {
  return conditional_outputs(model.propagate(seq), l1, l2);
}

/// Restriction of a reference-box vector to the states of a smaller box.
inline Vector restrict_to(const Truncation& small, const Truncation& big, const Vector& P_big) {
  if (!big.includes(small)) throw PreconditionError("restrict_to: reference box does not contain the model box");
  Vector out(static_cast<Eigen::Index>(small.size()));
  for (std::size_t j = 0; j < small.size(); ++j)
    out[static_cast<Eigen::Index>(j)] = P_big[static_cast<Eigen::Index>(big.index(small.state(j)))];
  return out;
}

struct ErrorBoundReport {
  double min_gap = 0.0;  ///< min_j (P_j - P̄_j) on shared states
  double l1_diff = 0.0;  ///< sum_j |P_j - P̄_j| on shared states
  double epsilon = 0.0;
  bool lower_holds = false;
  bool l1_holds = false;
  bool holds() const { return lower_holds && l1_holds; }
};

/// Checks P_j >= P̄_j and ||P_J - P̄_J||_1 <= epsilon with a larger box standing in for the full chain.
inline ErrorBoundReport error_bound_check(const FspModel& model, const ModeSequence& seq, const FspModel& reference,
                                          std::optional<double> epsilon = std::nullopt) {
  if (!reference.truncation().includes(model.truncation()))
    throw PreconditionError("error_bound_check: reference truncation must contain the model truncation");
  const double eps = epsilon ? *epsilon : model.epsilon.value_or(1.0);
  const Vector Pbar = model.propagate(seq);
  const Vector P = restrict_to(model.truncation(), reference.truncation(), reference.propagate(seq));
  ErrorBoundReport r;
  r.epsilon = eps;
  r.min_gap = (P - Pbar).minCoeff();
  r.l1_diff = (P - Pbar).cwiseAbs().sum();
  r.lower_holds = r.min_gap >= -1e-12;
  r.l1_holds = r.l1_diff <= eps + 1e-12;
  return r;
}

}  // namespace reachmo

#endif  // REACHMO_FSP_HPP

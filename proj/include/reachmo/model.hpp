#ifndef REACHMO_MODEL_HPP
#define REACHMO_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reachmo/error.hpp"

namespace reachmo {

/// Copy-number state of the network, one entry per species.
using State = std::vector<std::int64_t>;

/// One input level per control channel.
using InputVector = std::vector<double>;

/// h(z) = prod_s binom(z_s, consumed_s).
struct MassAction {
  bool operator==(const MassAction&) const = default;
};

/// h(z) = scale * (a z_s) / (b + a z_s) on one designated species.
struct MichaelisMenten {
  int species = 0;
  double a = 1.0;
  double b = 1.0;
  double scale = 1.0;
  bool operator==(const MichaelisMenten&) const = default;
};

/// h(z) = w + v^T z.
struct CustomAffine {
  double w = 0.0;
  std::vector<double> v;
  bool operator==(const CustomAffine&) const = default;
};

using PropensityLaw = std::variant<MassAction, MichaelisMenten, CustomAffine>;

struct Reaction {
  std::string name;
  std::vector<int> consumed;  ///< reactant stoichiometry, one entry per species
  std::vector<int> produced;
  double rate = 0.0;
  PropensityLaw law = MassAction{};
  std::optional<int> channel;  ///< 0-based control channel modulating this reaction

  int order() const {
    int k = 0;
    for (int c : consumed) k += c;
    return k;
  }
  std::vector<int> net_change() const {
    std::vector<int> nu(consumed.size());
    for (std::size_t s = 0; s < nu.size(); ++s) nu[s] = produced[s] - consumed[s];
    return nu;
  }
  bool controlled() const { return channel.has_value(); }
  bool operator==(const Reaction&) const = default;
};

/// Finite level set {sigma^1 < ... < sigma^q} or a continuous interval [0, max].
struct InputChannel {
  std::string name;
  std::vector<double> levels;
  std::optional<double> interval_max;

  bool finite() const { return !interval_max.has_value(); }
  double max_level() const { return finite() ? levels.back() : *interval_max; }
  double min_level() const { return finite() ? levels.front() : 0.0; }
  bool operator==(const InputChannel&) const = default;
};

/// Switching instants 0 = t_0 < t_1 < ... < t_{K+1} = T.
struct Schedule {
  double t_final = 0.0;
  std::vector<double> switch_times;

  std::vector<double> instants() const {
    std::vector<double> t{0.0};
    t.insert(t.end(), switch_times.begin(), switch_times.end());
    t.push_back(t_final);
    return t;
  }
  std::size_t stages() const { return switch_times.size() + 1; }
  bool operator==(const Schedule&) const = default;
};

struct WeightedState {
  State state;
  double prob = 0.0;
  bool operator==(const WeightedState&) const = default;
};

struct ReactionNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  std::vector<InputChannel> channels;
  Schedule schedule;
  std::optional<State> initial_state;
  std::vector<WeightedState> initial_distribution;
  std::vector<std::string> warnings;  ///< non-fatal validation findings

  std::size_t num_species() const { return species.size(); }
  std::size_t num_channels() const { return channels.size(); }

  int species_index(const std::string& name) const {
    for (std::size_t s = 0; s < species.size(); ++s)
      if (species[s] == name) return static_cast<int>(s);
    return -1;
  }

  /// Initial law as a list of weighted states (a point mass at the origin when unspecified).
  std::vector<WeightedState> initial_law() const {
    if (!initial_distribution.empty()) return initial_distribution;
    if (initial_state) return {{*initial_state, 1.0}};
    return {{State(species.size(), 0), 1.0}};
  }
  bool operator==(const ReactionNetwork&) const = default;
};

/// Cartesian product of the per-channel level sets, first channel most significant.
struct ModeSet {
  std::vector<InputVector> modes;
  std::size_t size() const { return modes.size(); }
  const InputVector& operator[](std::size_t i) const { return modes[i]; }
};

inline double binomial(std::int64_t n, int k) {
  if (k < 0 || n < k) return 0.0;
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= static_cast<double>(n - j) / static_cast<double>(j + 1);
  return r;
}

/// True when the propensity is affine in z (mass action of order <= 1 or custom affine).
inline bool is_affine(const Reaction& r) {
  if (std::holds_alternative<CustomAffine>(r.law)) return true;
  if (std::holds_alternative<MassAction>(r.law)) return r.order() <= 1;
  return false;
}

/// True when the propensity does not depend on the state.
inline bool is_state_independent(const Reaction& r) {
  if (const auto* ca = std::get_if<CustomAffine>(&r.law)) {
    for (double v : ca->v)
      if (v != 0.0) return false;
    return true;
  }
  if (std::holds_alternative<MassAction>(r.law)) return r.order() == 0;
  return false;
}

/// theta_r h_r(z), scaled by the channel level of `mode` when the reaction is controlled.
inline double propensity(const Reaction& r, const State& z, const InputVector& mode) {
  for (auto zs : z)
    if (zs < 0) throw DomainError("propensity: negative copy number");
  if (z.size() != r.consumed.size()) throw DimensionError("propensity: state has wrong length");

  double h = 0.0;
  if (std::holds_alternative<MassAction>(r.law)) {
    h = 1.0;
    for (std::size_t s = 0; s < z.size() && h != 0.0; ++s) h *= binomial(z[s], r.consumed[s]);
  } else if (const auto* mm = std::get_if<MichaelisMenten>(&r.law)) {
    for (std::size_t s = 0; s < z.size(); ++s)
      if (z[s] < r.consumed[s]) return 0.0;
    const double az = mm->a * static_cast<double>(z[mm->species]);
    h = mm->scale * az / (mm->b + az);
  } else {
    const auto& ca = std::get<CustomAffine>(r.law);
    h = ca.w;
    for (std::size_t s = 0; s < z.size(); ++s) h += ca.v[s] * static_cast<double>(z[s]);
    if (h < 0.0) throw DomainError("propensity: custom_affine law negative at state");
  }
  double a = r.rate * h;
  if (r.channel) {
    if (static_cast<std::size_t>(*r.channel) >= mode.size())
      throw DimensionError("propensity: mode vector too short for channel");
    a *= mode[*r.channel];
  }
  return a;
}

inline int max_reaction_order(const ReactionNetwork& net) {
  int k = 0;
  for (const auto& r : net.reactions) k = std::max(k, r.order());
  return k;
}

/// Lexicographic enumeration of the finite input set.
inline ModeSet enumerate_modes(const ReactionNetwork& net) {
  ModeSet out;
  for (const auto& ch : net.channels)
    if (!ch.finite())
      throw UnsupportedError("enumerate_modes: channel '" + ch.name +
                             "' is continuous; switched analyses need finite level sets");
  out.modes.push_back({});
  for (const auto& ch : net.channels) {
    std::vector<InputVector> next;
    next.reserve(out.modes.size() * ch.levels.size());
    for (const auto& prefix : out.modes)
      for (double level : ch.levels) {
        auto m = prefix;
        m.push_back(level);
        next.push_back(std::move(m));
      }
    out.modes = std::move(next);
  }
  return out;
}

/// Checks every structural invariant; appends soft findings to `net.warnings`.
inline void validate(ReactionNetwork& net) {
  const std::size_t S = net.species.size();
  if (S == 0) throw ValidationError("species-nonempty", "network has no species");
  for (std::size_t a = 0; a < S; ++a) {
    if (net.species[a].empty()) throw ValidationError("species-name", "empty species name");
    for (std::size_t b = a + 1; b < S; ++b)
      if (net.species[a] == net.species[b])
        throw ValidationError("species-unique", "duplicate species '" + net.species[a] + "'");
  }
  if (net.reactions.empty()) throw ValidationError("reactions-nonempty", "network has no reactions");

  for (std::size_t ri = 0; ri < net.reactions.size(); ++ri) {
    const auto& r = net.reactions[ri];
    const std::string tag = "reaction " + std::to_string(ri);
    if (r.consumed.size() != S || r.produced.size() != S)
      throw ValidationError("stoichiometry-length", tag + ": stoichiometry length differs from species count");
    for (std::size_t s = 0; s < S; ++s)
      if (r.consumed[s] < 0 || r.produced[s] < 0)
        throw ValidationError("stoichiometry-nonnegative", tag + ": negative coefficient");
    if (!std::isfinite(r.rate) || r.rate < 0.0)
      throw ValidationError("rate-nonnegative", tag + ": rate must be finite and >= 0");
    if (const auto* mm = std::get_if<MichaelisMenten>(&r.law)) {
      if (mm->species < 0 || static_cast<std::size_t>(mm->species) >= S)
        throw ValidationError("michaelis-menten-species", tag + ": unknown species");
      if (!(mm->a > 0.0) || !(mm->b > 0.0) || !(mm->scale > 0.0))
        throw ValidationError("michaelis-menten-positive", tag + ": a, b, scale must be > 0");
    }
    if (const auto* ca = std::get_if<CustomAffine>(&r.law)) {
      if (ca->v.size() != S) throw ValidationError("custom-affine-length", tag + ": v has wrong length");
      if (!(ca->w >= 0.0)) throw ValidationError("custom-affine-origin", tag + ": w must be >= 0");
    }
    if (r.channel && (*r.channel < 0 || static_cast<std::size_t>(*r.channel) >= net.channels.size()))
      throw ValidationError("channel-reference", tag + ": control_channel out of range");
  }

  for (std::size_t ci = 0; ci < net.channels.size(); ++ci) {
    const auto& ch = net.channels[ci];
    const std::string tag = "channel " + std::to_string(ci);
    if (ch.finite()) {
      if (ch.levels.empty()) throw ValidationError("levels-nonempty", tag + ": empty level set");
      for (std::size_t k = 0; k < ch.levels.size(); ++k) {
        if (!std::isfinite(ch.levels[k]) || ch.levels[k] < 0.0)
          throw ValidationError("levels-nonnegative", tag + ": levels must be finite and >= 0");
        if (k > 0 && !(ch.levels[k] > ch.levels[k - 1]))
          throw ValidationError("levels-increasing", tag + ": levels must be strictly increasing");
      }
      if (ch.levels.front() != 0.0)
        net.warnings.push_back(tag + ": lowest level is " + std::to_string(ch.levels.front()) +
                               " rather than 0");
      if (ch.levels.size() < 2) net.warnings.push_back(tag + ": single level, channel is constant");
    } else if (!(*ch.interval_max > 0.0) || !std::isfinite(*ch.interval_max)) {
      throw ValidationError("interval-positive", tag + ": interval upper bound must be > 0");
    }
  }

  const auto& sc = net.schedule;
  if (!(sc.t_final > 0.0) || !std::isfinite(sc.t_final))
    throw ValidationError("schedule-final-time", "t_final must be > 0");
  double prev = 0.0;
  for (double t : sc.switch_times) {
    if (!(t > prev) || !(t < sc.t_final))
      throw ValidationError("schedule-increasing", "switch_times must be strictly increasing in (0, t_final)");
    prev = t;
  }

  if (net.initial_state) {
    if (net.initial_state->size() != S) throw ValidationError("initial-state-length", "initial_state length");
    for (auto z : *net.initial_state)
      if (z < 0) throw ValidationError("initial-state-nonnegative", "negative initial copy number");
  }
  if (!net.initial_distribution.empty()) {
    if (net.initial_state)
      throw ValidationError("initial-exclusive", "give initial_state or initial_distribution, not both");
    double total = 0.0;
    for (const auto& ws : net.initial_distribution) {
      if (ws.state.size() != S) throw ValidationError("initial-distribution-length", "state length");
      for (auto z : ws.state)
        if (z < 0) throw ValidationError("initial-distribution-nonnegative", "negative copy number");
      if (!(ws.prob >= 0.0)) throw ValidationError("initial-distribution-prob", "negative probability");
      total += ws.prob;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ValidationError("initial-distribution-sum", "probabilities sum to " + std::to_string(total));
  }
}

}  // namespace reachmo

#endif  // REACHMO_MODEL_HPP

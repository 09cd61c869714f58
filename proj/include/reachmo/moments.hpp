#ifndef REACHMO_MOMENTS_HPP
#define REACHMO_MOMENTS_HPP

// Closed first- and second-moment equations for networks whose propensities
// are affine in the state. State layout: E[Z_1..Z_S], then Cov[Z_a, Z_b]
// for a <= b in row-major upper-triangular order.

#include <string>
#include <vector>

#include "reachmo/linalg.hpp"
#include "reachmo/model.hpp"
#include "reachmo/switched.hpp"

namespace reachmo {

enum class ControlClass { linear, switched_affine };

inline const char* to_string(ControlClass c) {
  return c == ControlClass::linear ? "linear" : "switched_affine";
}

inline std::size_t moment_dim(std::size_t S) { return S + S * (S + 1) / 2; }

/// Position of Cov[Z_a, Z_b] in the moment vector (order of a, b irrelevant).
inline std::size_t cov_index(std::size_t S, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return S + a * (2 * S - a + 1) / 2 + (b - a);
}

/// Human-readable label of each moment coordinate ("E[M]", "V[P]", "Cov[M,P]").
inline std::vector<std::string> moment_labels(const std::vector<std::string>& species) {
  const std::size_t S = species.size();
  std::vector<std::string> out(moment_dim(S));
  for (std::size_t s = 0; s < S; ++s) out[s] = "E[" + species[s] + "]";
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = a; b < S; ++b)
      out[cov_index(S, a, b)] =
          a == b ? "V[" + species[a] + "]" : "Cov[" + species[a] + "," + species[b] + "]";
  return out;
}

/// Effective propensity w + v^T z of one reaction at a fixed input level.
struct AffinePropensity {
  double w = 0.0;
  Vector v;
};

/// Level applied to a reaction under `mode` (1 when the reaction is not controlled).
inline double reaction_level(const Reaction& r, const InputVector& mode) {
  if (!r.channel) return 1.0;
  if (static_cast<std::size_t>(*r.channel) >= mode.size())
    throw DimensionError("mode vector shorter than referenced channel");
  return mode[*r.channel];
}

inline AffinePropensity affine_form(const Reaction& r, const InputVector& mode) {
  const std::size_t S = r.consumed.size();
  AffinePropensity out{0.0, Vector::Zero(static_cast<Eigen::Index>(S))};
  const double scale = r.rate * reaction_level(r, mode);
  if (const auto* ca = std::get_if<CustomAffine>(&r.law)) {
    out.w = scale * ca->w;
    for (std::size_t s = 0; s < S; ++s) out.v[s] = scale * ca->v[s];
    return out;
  }
  const std::string tag = r.name.empty() ? std::string("reaction") : "reaction '" + r.name + "'";
  if (std::holds_alternative<MichaelisMenten>(r.law))
    throw NonClosedMomentsError(tag + " has a Michaelis-Menten law; moment equations do not close, "
                                      "use the finite-state-projection path");
  if (r.order() >= 2)
    throw NonClosedMomentsError(tag + " has order " + std::to_string(r.order()) +
                                "; moment equations do not close, use the finite-state-projection path");
  if (r.order() == 0) {
    out.w = scale;
  } else {
    for (std::size_t s = 0; s < S; ++s)
      if (r.consumed[s] == 1) out.v[s] = scale;
  }
  return out;
}

/// True when first and second moments obey closed linear ODEs.
inline bool moments_close(const ReactionNetwork& net) {
  for (const auto& r : net.reactions)
    if (!is_affine(r)) return false;
  return true;
}

/// (A_i, b_i) of the moment ODE x' = A_i x + b_i at a fixed input vector.
inline std::pair<Matrix, Vector> build_moment_system(const ReactionNetwork& net, const InputVector& mode) {
  const std::size_t S = net.num_species();
  if (mode.size() != net.num_channels()) throw DimensionError("build_moment_system: mode has wrong length");
  const auto n = static_cast<Eigen::Index>(moment_dim(S));
  const auto Si = static_cast<Eigen::Index>(S);

  Matrix J = Matrix::Zero(Si, Si);
  Vector drift = Vector::Zero(Si);
  std::vector<AffinePropensity> forms;
  std::vector<Vector> nus;
  for (const auto& r : net.reactions) {
    forms.push_back(affine_form(r, mode));
    const auto nu_i = r.net_change();
    Vector nu(Si);
    for (std::size_t s = 0; s < S; ++s) nu[s] = nu_i[s];
    J += nu * forms.back().v.transpose();
    drift += nu * forms.back().w;
    nus.push_back(std::move(nu));
  }

  Matrix A = Matrix::Zero(n, n);
  Vector b = Vector::Zero(n);
  A.topLeftCorner(Si, Si) = J;
  b.head(Si) = drift;

  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t c = a; c < S; ++c) {
      const auto row = static_cast<Eigen::Index>(cov_index(S, a, c));
      // J Sigma + Sigma J^T, entry (a, c)
      for (std::size_t k = 0; k < S; ++k) {
        A(row, cov_index(S, k, c)) += J(a, k);
        A(row, cov_index(S, a, k)) += J(c, k);
      }
      // sum_r nu_r nu_r^T (w_r + v_r^T mu)
      for (std::size_t r = 0; r < nus.size(); ++r) {
        const double q = nus[r][a] * nus[r][c];
        if (q == 0.0) continue;
        b[row] += q * forms[r].w;
        for (std::size_t s = 0; s < S; ++s) A(row, s) += q * forms[r].v[s];
      }
    }
  return {A, b};
}

/// Channels with a single level act as constants and do not make a reaction controlled.
inline bool effectively_controlled(const ReactionNetwork& net, const Reaction& r) {
  if (!r.channel) return false;
  const auto& ch = net.channels[*r.channel];
  return !(ch.finite() && ch.levels.size() == 1);
}

/// Linear iff every effectively controlled reaction has a state-independent propensity.
inline ControlClass classify_control(const ReactionNetwork& net) {
  for (const auto& r : net.reactions)
    if (effectively_controlled(net, r) && !is_state_independent(r)) return ControlClass::switched_affine;
  return ControlClass::linear;
}

/// Moment vector of the initial law (means and covariances).
inline Vector initial_moments(const ReactionNetwork& net) {
  const std::size_t S = net.num_species();
  const auto law = net.initial_law();
  Vector mu = Vector::Zero(static_cast<Eigen::Index>(S));
  for (const auto& ws : law)
    for (std::size_t s = 0; s < S; ++s) mu[s] += ws.prob * static_cast<double>(ws.state[s]);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(moment_dim(S)));
  x.head(static_cast<Eigen::Index>(S)) = mu;
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t c = a; c < S; ++c) {
      double cov = 0.0;
      for (const auto& ws : law)
        cov += ws.prob * (static_cast<double>(ws.state[a]) - mu[a]) * (static_cast<double>(ws.state[c]) - mu[c]);
      x[cov_index(S, a, c)] = cov;
    }
  return x;
}

/// One moment system per mode of `enumerate_modes`, with the network schedule.
inline SwitchedAffineSystem to_switched_system(const ReactionNetwork& net) {
  const auto modes = enumerate_modes(net);
  std::vector<Matrix> As;
  std::vector<Vector> bs;
  for (const auto& m : modes.modes) {
    auto [A, b] = build_moment_system(net, m);
    As.push_back(std::move(A));
    bs.push_back(std::move(b));
  }
  return {std::move(As), std::move(bs), net.schedule.instants(), initial_moments(net)};
}

/// x' = A x + B u + f with u_r in [lo_r, hi_r] (continuous input box).
struct LinearModel {
  Matrix A;
  Matrix B;
  Vector f;
  Vector lo;
  Vector hi;
  Vector x0;
  double T = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(B.cols()); }
};

/// Linear form of a network classified as linear. Channel ranges are
/// [min level, max level] (or [0, max] for continuous channels).
inline LinearModel to_linear_model(const ReactionNetwork& net) {
  if (classify_control(net) != ControlClass::linear)
    throw UnsupportedError("to_linear_model: a state-dependent reaction is controlled; use the switched path");
  const std::size_t m = net.num_channels();
  InputVector base(m, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (net.channels[r].finite() && net.channels[r].levels.size() == 1) base[r] = net.channels[r].levels[0];
  auto [A, f] = build_moment_system(net, base);
  LinearModel lm;
  lm.A = A;
  lm.f = f;
  lm.B = Matrix::Zero(A.rows(), static_cast<Eigen::Index>(m));
  lm.lo = Vector(static_cast<Eigen::Index>(m));
  lm.hi = Vector(static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < m; ++r) {
    if (base[r] != 0.0) {
      lm.lo[r] = lm.hi[r] = base[r];  // constant channel, already folded into (A, f)
      continue;
    }
    InputVector unit = base;
    unit[r] = 1.0;
    lm.B.col(static_cast<Eigen::Index>(r)) = build_moment_system(net, unit).second - f;
    lm.lo[r] = net.channels[r].min_level();
    lm.hi[r] = net.channels[r].max_level();
  }
  lm.x0 = initial_moments(net);
  lm.T = net.schedule.t_final;
  return lm;
}

}  // namespace reachmo

#endif  // REACHMO_MOMENTS_HPP

#ifndef REACHMO_SWITCHED_HPP
#define REACHMO_SWITCHED_HPP

#include <cstddef>
#include <vector>

#include "reachmo/linalg.hpp"

namespace reachmo {

/// Mode indices i_0 .. i_K, 0-based.
using ModeSequence = std::vector<int>;

/// x' = A_sigma x + b_sigma with sigma constant on each [t_k, t_{k+1}).
/// Exact per-stage steps (Abar_i^k, bbar_i^k) are kept in `steps[k][i]`.
class SwitchedAffineSystem {
 public:
  SwitchedAffineSystem() = default;

  SwitchedAffineSystem(std::vector<Matrix> A, std::vector<Vector> b, std::vector<double> instants,
                       Vector x0)
      : A_(std::move(A)), b_(std::move(b)), instants_(std::move(instants)), x0_(std::move(x0)) {
    if (A_.empty() || A_.size() != b_.size()) throw DimensionError("switched system: mode list mismatch");
    const auto n = x0_.size();
    for (std::size_t i = 0; i < A_.size(); ++i)
      if (A_[i].rows() != n || A_[i].cols() != n || b_[i].size() != n)
        throw DimensionError("switched system: mode " + std::to_string(i) + " has wrong dimension");
    set_instants(instants_);
  }

  /// A system given directly by its discrete stage maps (no continuous-time modes).
  static SwitchedAffineSystem from_steps(std::vector<std::vector<AffineStep>> steps, Vector x0,
                                         std::vector<double> instants = {}) {
    SwitchedAffineSystem s;
    if (steps.empty() || steps.front().empty()) throw DimensionError("from_steps: no stages");
    for (const auto& st : steps) {
      if (st.size() != steps.front().size()) throw DimensionError("from_steps: ragged mode count");
      for (const auto& m : st)
        if (m.Abar.rows() != x0.size() || m.Abar.cols() != x0.size() || m.bbar.size() != x0.size())
          throw DimensionError("from_steps: step dimension mismatch");
    }
    if (instants.empty())
      for (std::size_t k = 0; k <= steps.size(); ++k) instants.push_back(static_cast<double>(k));
    if (instants.size() != steps.size() + 1) throw DimensionError("from_steps: instants length");
    s.instants_ = std::move(instants);
    s.steps_ = std::move(steps);
    s.x0_ = std::move(x0);
    return s;
  }

  /// Replaces the schedule and recomputes every stage map.
  void set_instants(std::vector<double> instants) {
    if (instants.size() < 2) throw DomainError("switched system: need t_0 < t_1");
    for (std::size_t k = 0; k + 1 < instants.size(); ++k)
      if (!(instants[k + 1] > instants[k])) throw DomainError("switched system: instants not increasing");
    instants_ = std::move(instants);
    if (A_.empty()) return;
    steps_.assign(instants_.size() - 1, {});
    for (std::size_t k = 0; k + 1 < instants_.size(); ++k) {
      const double tau = instants_[k + 1] - instants_[k];
      bool reuse = k > 0 && tau == instants_[k] - instants_[k - 1];
      if (reuse) {
        steps_[k] = steps_[k - 1];
        continue;
      }
      for (std::size_t i = 0; i < A_.size(); ++i) steps_[k].push_back(affine_step(A_[i], b_[i], tau));
    }
  }

  std::size_t dim() const { return static_cast<std::size_t>(x0_.size()); }
  std::size_t num_modes() const { return steps_.front().size(); }
  std::size_t num_stages() const { return steps_.size(); }  ///< K + 1
  const Vector& x0() const { return x0_; }
  const std::vector<double>& instants() const { return instants_; }
  const std::vector<Matrix>& A() const { return A_; }
  const std::vector<Vector>& b() const { return b_; }
  const AffineStep& step(std::size_t k, std::size_t i) const { return steps_[k][i]; }

  void check_sequence(const ModeSequence& seq) const {
    if (seq.size() != num_stages()) throw DimensionError("mode sequence length differs from K+1");
    for (int i : seq)
      if (i < 0 || static_cast<std::size_t>(i) >= num_modes()) throw DomainError("mode index out of range");
  }

  /// x_0 .. x_{K+1} under `seq`.
  std::vector<Vector> trajectory(const ModeSequence& seq) const {
    check_sequence(seq);
    std::vector<Vector> xs{x0_};
    xs.reserve(seq.size() + 1);
    for (std::size_t k = 0; k < seq.size(); ++k) {
      const auto& st = steps_[k][seq[k]];
      xs.push_back(st.Abar * xs.back() + st.bbar);
    }
    return xs;
  }

  Vector terminal(const ModeSequence& seq) const { return trajectory(seq).back(); }

 private:
  std::vector<Matrix> A_;
  std::vector<Vector> b_;
  std::vector<double> instants_;
  Vector x0_;
  std::vector<std::vector<AffineStep>> steps_;
};

}  // namespace reachmo

#endif  // REACHMO_SWITCHED_HPP

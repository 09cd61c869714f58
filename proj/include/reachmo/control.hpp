#ifndef REACHMO_CONTROL_HPP
#define REACHMO_CONTROL_HPP

// Maximizing the probability that a single cell sits in a target set at the
// final time, over open-loop switching signals, on a certified truncation.

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "reachmo/fsp.hpp"
#include "reachmo/milp.hpp"

namespace reachmo {

/// Boolean combination of per-species threshold comparisons, e.g.
/// "P>=15", "M<3 && !(P==0)", "true". Operators: < <= > >= == !=, &&, ||, !, ().
class TargetSet {
 public:
  TargetSet() = default;

  static TargetSet parse(const std::string& text, const std::vector<std::string>& species) {
    TargetSet t;
    t.text_ = text;
    Parser p{text, species, 0};
    t.root_ = p.parse_or();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + text.substr(p.pos, 1) + "'");
    return t;
  }

  const std::string& text() const { return text_; }

  bool contains(const State& z) const {
    if (!root_) throw PreconditionError("target set is empty (not parsed)");
    return root_->eval(z);
  }

  /// States outside the target (the avoid-set reformulation T = D^c).
  TargetSet complement() const {
    TargetSet t;
    t.text_ = "!(" + text_ + ")";
    auto n = std::make_shared<Node>();
    n->kind = Node::Not;
    n->lhs = root_;
    t.root_ = n;
    return t;
  }

  /// 1̄_T: indicator of the target on the truncation.
  Vector indicator(const Truncation& J) const {
    Vector v(static_cast<Eigen::Index>(J.size()));
    for (std::size_t j = 0; j < J.size(); ++j) v[static_cast<Eigen::Index>(j)] = contains(J.state(j)) ? 1.0 : 0.0;
    return v;
  }

 private:
  struct Node {
    enum Kind { Const, Cmp, Not, And, Or } kind = Const;
    bool value = false;
    std::size_t species = 0;
    std::string op;
    std::int64_t threshold = 0;
    std::shared_ptr<const Node> lhs, rhs;

    bool eval(const State& z) const {
      switch (kind) {
        case Const: return value;
        case Not: return !lhs->eval(z);
        case And: return lhs->eval(z) && rhs->eval(z);
        case Or: return lhs->eval(z) || rhs->eval(z);
        case Cmp: break;
      }
      if (species >= z.size()) throw DimensionError("target set: state has too few species");
      const auto x = z[species];
      if (op == "<") return x < threshold;
      if (op == "<=") return x <= threshold;
      if (op == ">") return x > threshold;
      if (op == ">=") return x >= threshold;
      if (op == "==") return x == threshold;
      return x != threshold;
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Parser {
    const std::string& s;
    const std::vector<std::string>& species;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw ParseError("target", what + " at column " + std::to_string(pos + 1) + " of \"" + s + "\"");
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(const std::string& tok) {
      skip();
      if (s.compare(pos, tok.size(), tok) == 0) {
        pos += tok.size();
        return true;
      }
      return false;
    }
    static NodePtr binary(Node::Kind k, NodePtr a, NodePtr b) {
      auto n = std::make_shared<Node>();
      n->kind = k;
      n->lhs = std::move(a);
      n->rhs = std::move(b);
      return n;
    }
    NodePtr parse_or() {
      NodePtr a = parse_and();
      while (eat("||")) a = binary(Node::Or, a, parse_and());
      return a;
    }
    NodePtr parse_and() {
      NodePtr a = parse_unary();
      while (eat("&&")) a = binary(Node::And, a, parse_unary());
      return a;
    }
    NodePtr parse_unary() {
      skip();
      if (pos < s.size() && s[pos] == '!' && (pos + 1 >= s.size() || s[pos + 1] != '=')) {
        ++pos;
        auto n = std::make_shared<Node>();
        n->kind = Node::Not;
        n->lhs = parse_unary();
        return n;
      }
      if (eat("(")) {
        NodePtr e = parse_or();
        if (!eat(")")) fail("expected ')'");
        return e;
      }
      return parse_atom();
    }
    NodePtr parse_atom() {
      skip();
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name.empty()) fail("expected a species name");
      auto n = std::make_shared<Node>();
      if (name == "true" || name == "false") {
        n->kind = Node::Const;
        n->value = name == "true";
        return n;
      }
      std::size_t idx = species.size();
      for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i] == name) idx = i;
      if (idx == species.size()) {
        pos = start;
        fail("unknown species '" + name + "'");
      }
      n->kind = Node::Cmp;
      n->species = idx;
      for (const char* op : {"<=", ">=", "==", "!=", "<", ">"})
        if (eat(op)) {
          n->op = op;
          break;
        }
      if (n->op.empty()) fail("expected a comparison operator");
      skip();
      const std::size_t num = pos;
      if (pos < s.size() && s[pos] == '-') ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == num || (pos == num + 1 && s[num] == '-')) fail("expected an integer threshold");
      n->threshold = std::stoll(s.substr(num, pos - num));
      return n;
    }
  };

  std::string text_;
  NodePtr root_;
};

struct TargetResult {
  ModeSequence sequence;
  double prob_lower = 0.0;  ///< P̄_T(sigma*) on the truncation
  double prob_upper = 0.0;  ///< P̄_T(sigma*) + 2 eps, bounds the true P_T(sigma*)
  double gap = 0.0;         ///< 2 eps: proved suboptimality of sigma* for the full chain
  double epsilon = 0.0;
  BranchBoundStats stats;
};

/// argmax over sequences of 1̄_T^T P̄_J(T; sigma) via the MILP with M = 1.
inline TargetResult max_target_probability(const FspModel& model, const TargetSet& target,
                                           const BranchBoundOptions& opt = {}) {
  if (!model.epsilon) throw PreconditionError("max_target_probability: model has no mass certificate");
  const double eps = *model.epsilon;
  const auto sys = model.probability_system();
  const auto n = static_cast<Eigen::Index>(model.size());
  const Vector c = target.indicator(model.truncation());
  const auto sol = solve_sequence(sys, c, Sense::max, compute_bigM(sys, Vector::Ones(n)), opt);
  TargetResult r;
  r.sequence = sol.sequence;
  r.prob_lower = sol.value;
  r.prob_upper = sol.value + 2.0 * eps;
  r.gap = 2.0 * eps;
  r.epsilon = eps;
  r.stats = sol.stats;
  return r;
}

/// Maximizes the probability of avoiding `avoid` by targeting its complement.
inline TargetResult max_avoid_probability(const FspModel& model, const TargetSet& avoid,
                                          const BranchBoundOptions& opt = {}) {
  return max_target_probability(model, avoid.complement(), opt);
}

}  // namespace reachmo

#endif  // REACHMO_CONTROL_HPP

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "synthmt/rational.hpp"

namespace synthmt {

enum class Sort { Int, Real };

std::string to_string(Sort s);

using Value = Rational;

/// Total assignment over some set of variables. std::map keeps rendering and
/// iteration deterministic.
using Valuation = std::map<std::string, Value>;

/// Throws ContractViolation unless v assigns exactly `names` with values of
/// the given sort (Int sort requires integer values).
void validate_valuation(const Valuation& v, const std::vector<std::string>& names, Sort sort,
                        const std::string& role);

enum class RelOp { Lt, Le, Eq, Ne, Ge, Gt };

RelOp parse_relop(std::string_view tok);
std::string_view relop_text(RelOp op);

/// A canonical linear-arithmetic atom: sum(coeff_i * var_i) relop constant.
///
/// Canonical form: integer coefficients with joint gcd 1 (constant included,
/// after clearing its denominator); {>, >=} rewritten to {<, <=} by negating
/// both sides; for the symmetric relops {=, !=} the first nonzero coefficient
/// in variable-name order is positive. Two equivalent atoms compare equal.
class Literal {
 public:
  /// Builds the canonical form of sum(terms) relop rhs. Throws
  /// ContractViolation when no variable has a nonzero coefficient.
  static Literal make(const std::map<std::string, Rational>& terms, RelOp op, const Rational& rhs);

  const std::map<std::string, std::int64_t>& coeffs() const { return coeffs_; }
  std::int64_t constant() const { return constant_; }
  RelOp relop() const { return relop_; }

  bool mentions(const std::string& var) const { return coeffs_.count(var) != 0; }
  std::vector<std::string> variables() const;

  /// Stable, bit-exact canonical rendering, e.g. "1*y + -1*x <= 0".
  std::string text() const;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.relop_ == b.relop_ && a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const Literal& a, const Literal& b) { return !(a == b); }
  friend bool operator<(const Literal& a, const Literal& b);

 private:
  Literal() = default;

  std::map<std::string, std::int64_t> coeffs_;
  std::int64_t constant_ = 0;
  RelOp relop_ = RelOp::Lt;
};

/// Canonical complement: < <-> >=, <= <-> >, = <-> != (re-canonicalized).
/// Involution: negate(negate(l)) == l.
Literal negate_literal(const Literal& l);

/// Result of substituting environment values into a literal: either a residual
/// atom over the remaining (system) variables or a ground truth value.
struct GroundedLiteral {
  std::optional<Literal> residual;
  bool truth = false;

  bool is_ground() const { return !residual.has_value(); }
};

/// Substitutes env values into l. Variables of l not assigned by env must be
/// listed in sys_vars, otherwise ContractViolation.
GroundedLiteral ground(const Literal& l, const Valuation& env, const std::set<std::string>& sys_vars);

/// Exact evaluation under a full valuation; ContractViolation on a missing
/// variable.
bool eval_ground(const Literal& l, const Valuation& full);

/// Polarity assignment over an ordered literal list. Bit i of `index` is the
/// polarity of literal i (set = positive).
struct Cube {
  std::uint32_t index = 0;

  bool bit(int i) const { return (index >> i) & 1u; }

  friend bool operator==(const Cube& a, const Cube& b) { return a.index == b.index; }
};

/// Conjunct i is lits[i] when bit i of c is set, negate_literal(lits[i])
/// otherwise. Throws ContractViolation when c.index is out of range for
/// |lits| bits.
std::vector<Literal> cube_formula(const Cube& c, std::span<const Literal> lits);

/// Human-readable cube rendering over atom names s0..s{L-1}, e.g.
/// "!s0 & s1 & s2".
std::string cube_text(const Cube& c, int num_literals);

/// First-order formula shell over literals, used to phrase solver queries
/// (grounded cube conjunctions, partition characteristic conditions).
struct Formula {
  enum class Kind { True, False, Atom, Not, And, Or, Exists, Forall };

  Kind kind = Kind::True;
  std::optional<Literal> atom;
  std::vector<Formula> kids;
  std::vector<std::string> bound;  // Exists/Forall; sort comes from context

  static Formula boolean(bool b) { return Formula{b ? Kind::True : Kind::False, {}, {}, {}}; }
  static Formula lit(Literal l) { return Formula{Kind::Atom, std::move(l), {}, {}}; }
  static Formula negate(Formula f) { return Formula{Kind::Not, {}, {std::move(f)}, {}}; }
  static Formula conj(std::vector<Formula> fs) { return Formula{Kind::And, {}, std::move(fs), {}}; }
  static Formula disj(std::vector<Formula> fs) { return Formula{Kind::Or, {}, std::move(fs), {}}; }
  static Formula exists(std::vector<std::string> vars, Formula body) {
    return Formula{Kind::Exists, {}, {std::move(body)}, std::move(vars)};
  }
  static Formula forall(std::vector<std::string> vars, Formula body) {
    return Formula{Kind::Forall, {}, {std::move(body)}, std::move(vars)};
  }

  bool quantifier_free() const;

  /// Evaluates a quantifier-free formula; ContractViolation on quantifiers or
  /// missing variables.
  bool eval(const Valuation& full) const;
};

/// Conjunction of (possibly negated) literals as a Formula.
Formula cube_conjunction(const Cube& c, std::span<const Literal> lits);

}  // namespace synthmt

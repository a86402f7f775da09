#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "synthmt/rational.hpp"

namespace minismt {

using Rat = synthmt::Rational;

enum class VarSort { Int, Real };

struct QeBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// sum(coeffs[v] * v) + constant
struct LinTerm {
  std::map<std::string, Rat> coeffs;
  Rat constant;

  static LinTerm of_const(Rat c) { return {{}, std::move(c)}; }
  static LinTerm of_var(const std::string& v) { return {{{v, Rat(1)}}, Rat(0)}; }

  bool is_constant() const { return coeffs.empty(); }
  Rat coeff(const std::string& v) const {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? Rat(0) : it->second;
  }

  void add(const std::string& v, const Rat& c);
  LinTerm& operator+=(const LinTerm& o);
  LinTerm& operator-=(const LinTerm& o);
  void scale(const Rat& c);
  LinTerm negated() const;
  /// this with var replaced by t (var's coefficient distributed over t).
  LinTerm substituted(const std::string& var, const LinTerm& t) const;
  Rat eval(const std::map<std::string, Rat>& val) const;

  friend bool operator==(const LinTerm& a, const LinTerm& b) {
    return a.constant == b.constant && a.coeffs == b.coeffs;
  }
  friend bool operator<(const LinTerm& a, const LinTerm& b) {
    if (!(a.constant == b.constant)) return a.constant < b.constant;
    return a.coeffs < b.coeffs;
  }
};

/// Lt: term < 0; Le: term <= 0; Eq: term = 0; Ne: term != 0;
/// Dvd: modulus | term; Ndvd: modulus does not divide term.
enum class AtomKind { Lt, Le, Eq, Ne, Dvd, Ndvd };

struct Atom {
  AtomKind kind = AtomKind::Lt;
  LinTerm term;
  std::int64_t modulus = 0;  // Dvd/Ndvd only, > 0

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.kind == b.kind && a.modulus == b.modulus && a.term == b.term;
  }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { True, False, Leaf, And, Or, Not, Exists, Forall };

  Kind kind = Kind::True;
  Atom atom;                                          // Leaf
  std::vector<NodePtr> kids;                          // And/Or/Not
  std::vector<std::pair<std::string, VarSort>> bound;  // Exists/Forall
};

NodePtr mk_bool(bool b);
/// Normalizes (integer coefficients, joint gcd 1, sign convention for
/// symmetric kinds, modulus folding) and constant-folds ground atoms.
NodePtr mk_atom(Atom a);
NodePtr mk_and(std::vector<NodePtr> kids);
NodePtr mk_or(std::vector<NodePtr> kids);
/// Folds constants and complements leaf atoms; otherwise wraps.
NodePtr mk_not(NodePtr n);
NodePtr mk_exists(std::vector<std::pair<std::string, VarSort>> vars, NodePtr body);
NodePtr mk_forall(std::vector<std::pair<std::string, VarSort>> vars, NodePtr body);

bool free_in(const NodePtr& n, const std::string& var);
void collect_free_vars(const NodePtr& n, std::set<std::string>& out);

/// Replaces free occurrences of var by term.
NodePtr substitute(const NodePtr& n, const std::string& var, const LinTerm& term);

/// Negation normal form: Not pushed onto atoms (complemented), quantifiers
/// dualized.
NodePtr nnf(const NodePtr& n, bool negate = false);

/// Evaluates a quantifier-free node under a total valuation.
bool eval(const NodePtr& n, const std::map<std::string, Rat>& val);

std::size_t node_count(const NodePtr& n);

}  // namespace minismt

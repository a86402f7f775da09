#include "synthmt/theory.hpp"

#include <algorithm>
#include <numeric>

#include "synthmt/errors.hpp"

namespace synthmt {

std::string to_string(Sort s) { return s == Sort::Int ? "Int" : "Real"; }

void validate_valuation(const Valuation& v, const std::vector<std::string>& names, Sort sort,
                        const std::string& role) {
  if (v.size() != names.size())
    throw ContractViolation(role + " valuation must assign exactly the declared variables");
  for (const auto& name : names) {
    auto it = v.find(name);
    if (it == v.end()) throw ContractViolation(role + " valuation missing variable '" + name + "'");
    if (sort == Sort::Int && !it->second.is_integer())
      throw ContractViolation(role + " valuation assigns non-integer value to '" + name +
                              "' under Int sort");
  }
}

RelOp parse_relop(std::string_view tok) {
  if (tok == "<") return RelOp::Lt;
  if (tok == "<=") return RelOp::Le;
  if (tok == "=") return RelOp::Eq;
  if (tok == "!=") return RelOp::Ne;
  if (tok == ">=") return RelOp::Ge;
  if (tok == ">") return RelOp::Gt;
  throw ContractViolation("unknown relational operator '" + std::string(tok) + "'");
}

std::string_view relop_text(RelOp op) {
  switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "!=";
    case RelOp::Ge: return ">=";
    case RelOp::Gt: return ">";
  }
  return "?";
}

Literal Literal::make(const std::map<std::string, Rational>& terms, RelOp op, const Rational& rhs) {
  // Clear denominators: multiply through by the lcm of all denominators.
  std::int64_t scale = 1;
  auto fold_den = [&scale](const Rational& r) {
    std::int64_t d = r.den();
    std::int64_t g = std::gcd(scale, d);
    __int128 s = __int128(scale) / g * d;
    scale = detail::narrow(s);
  };
  for (const auto& [name, c] : terms) fold_den(c);
  fold_den(rhs);

  std::map<std::string, std::int64_t> coeffs;
  for (const auto& [name, c] : terms) {
    Rational scaled = c * Rational(scale);
    if (scaled.is_zero()) continue;
    coeffs[name] = scaled.num();
  }
  if (coeffs.empty()) throw ContractViolation("atom has no variable with nonzero coefficient");
  Rational rhs_scaled = rhs * Rational(scale);
  std::int64_t constant = rhs_scaled.num();

  // Joint gcd reduction of coefficients and constant.
  std::int64_t g = 0;
  for (const auto& [name, c] : coeffs) g = std::gcd(g, c);
  g = std::gcd(g, constant);
  if (g > 1) {
    for (auto& [name, c] : coeffs) c /= g;
    constant /= g;
  }

  // Orient {>, >=} to {<, <=}; normalize the sign of symmetric relops.
  bool flip = false;
  if (op == RelOp::Gt) {
    op = RelOp::Lt;
    flip = true;
  } else if (op == RelOp::Ge) {
    op = RelOp::Le;
    flip = true;
  } else if (op == RelOp::Eq || op == RelOp::Ne) {
    flip = coeffs.begin()->second < 0;
  }
  if (flip) {
    for (auto& [name, c] : coeffs) c = -c;
    constant = -constant;
  }

  Literal l;
  l.coeffs_ = std::move(coeffs);
  l.constant_ = constant;
  l.relop_ = op;
  return l;
}

std::vector<std::string> Literal::variables() const {
  std::vector<std::string> out;
  out.reserve(coeffs_.size());
  for (const auto& [name, c] : coeffs_) out.push_back(name);
  return out;
}

std::string Literal::text() const {
  // Positive terms first, then negative, names ascending within each group.
  std::vector<std::pair<std::string, std::int64_t>> pos, neg;
  for (const auto& [name, c] : coeffs_) (c > 0 ? pos : neg).emplace_back(name, c);
  std::string out;
  auto emit = [&out](const std::pair<std::string, std::int64_t>& t) {
    if (!out.empty()) out += " + ";
    out += std::to_string(t.second) + "*" + t.first;
  };
  for (const auto& t : pos) emit(t);
  for (const auto& t : neg) emit(t);
  out += " ";
  out += relop_text(relop_);
  out += " " + std::to_string(constant_);
  return out;
}

bool operator<(const Literal& a, const Literal& b) {
  if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
  if (a.relop_ != b.relop_) return a.relop_ < b.relop_;
  return a.constant_ < b.constant_;
}

Literal negate_literal(const Literal& l) {
  std::map<std::string, Rational> terms;
  for (const auto& [name, c] : l.coeffs()) terms[name] = Rational(c);
  Rational rhs(l.constant());
  switch (l.relop()) {
    case RelOp::Lt: return Literal::make(terms, RelOp::Ge, rhs);
    case RelOp::Le: return Literal::make(terms, RelOp::Gt, rhs);
    case RelOp::Eq: return Literal::make(terms, RelOp::Ne, rhs);
    case RelOp::Ne: return Literal::make(terms, RelOp::Eq, rhs);
    case RelOp::Ge: return Literal::make(terms, RelOp::Lt, rhs);
    case RelOp::Gt: return Literal::make(terms, RelOp::Le, rhs);
  }
  throw ContractViolation("unreachable relop");
}

namespace {

bool compare(const Rational& lhs, RelOp op, const Rational& rhs) {
  switch (op) {
    case RelOp::Lt: return lhs < rhs;
    case RelOp::Le: return lhs <= rhs;
    case RelOp::Eq: return lhs == rhs;
    case RelOp::Ne: return lhs != rhs;
    case RelOp::Ge: return lhs >= rhs;
    case RelOp::Gt: return lhs > rhs;
  }
  throw ContractViolation("unreachable relop");
}

}  // namespace

GroundedLiteral ground(const Literal& l, const Valuation& env, const std::set<std::string>& sys_vars) {
  std::map<std::string, Rational> residual_terms;
  Rational rhs(l.constant());
  for (const auto& [name, c] : l.coeffs()) {
    auto it = env.find(name);
    if (it != env.end()) {
      rhs -= Rational(c) * it->second;  // moved to the RHS
    } else if (sys_vars.count(name)) {
      residual_terms[name] = Rational(c);
    } else {
      throw ContractViolation("variable '" + name + "' is neither assigned nor a system variable");
    }
  }
  GroundedLiteral out;
  if (residual_terms.empty()) {
    out.truth = compare(Rational(0), l.relop(), rhs);
  } else {
    out.residual = Literal::make(residual_terms, l.relop(), rhs);
  }
  return out;
}

bool eval_ground(const Literal& l, const Valuation& full) {
  Rational lhs(0);
  for (const auto& [name, c] : l.coeffs()) {
    auto it = full.find(name);
    if (it == full.end()) throw ContractViolation("valuation missing variable '" + name + "'");
    lhs += Rational(c) * it->second;
  }
  return compare(lhs, l.relop(), Rational(l.constant()));
}

std::vector<Literal> cube_formula(const Cube& c, std::span<const Literal> lits) {
  if (lits.size() >= 32 || c.index >= (1u << lits.size()))
    throw ContractViolation("cube index out of range for literal list width");
  std::vector<Literal> out;
  out.reserve(lits.size());
  for (size_t i = 0; i < lits.size(); ++i)
    out.push_back(c.bit(static_cast<int>(i)) ? lits[i] : negate_literal(lits[i]));
  return out;
}

std::string cube_text(const Cube& c, int num_literals) {
  std::string out;
  for (int i = 0; i < num_literals; ++i) {
    if (!out.empty()) out += " & ";
    if (!c.bit(i)) out += "!";
    out += "s" + std::to_string(i);
  }
  return out;
}

bool Formula::quantifier_free() const {
  if (kind == Kind::Exists || kind == Kind::Forall) return false;
  return std::all_of(kids.begin(), kids.end(), [](const Formula& f) { return f.quantifier_free(); });
}

bool Formula::eval(const Valuation& full) const {
  switch (kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: return eval_ground(*atom, full);
    case Kind::Not: return !kids[0].eval(full);
    case Kind::And:
      return std::all_of(kids.begin(), kids.end(), [&](const Formula& f) { return f.eval(full); });
    case Kind::Or:
      return std::any_of(kids.begin(), kids.end(), [&](const Formula& f) { return f.eval(full); });
    case Kind::Exists:
    case Kind::Forall: throw ContractViolation("cannot evaluate a quantified formula directly");
  }
  throw ContractViolation("unreachable formula kind");
}

Formula cube_conjunction(const Cube& c, std::span<const Literal> lits) {
  std::vector<Formula> fs;
  for (auto& l : cube_formula(c, lits)) fs.push_back(Formula::lit(std::move(l)));
  return Formula::conj(std::move(fs));
}

}  // namespace synthmt

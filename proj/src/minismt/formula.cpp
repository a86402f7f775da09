#include "minismt/formula.hpp"

#include <algorithm>
#include <numeric>

namespace minismt {

void LinTerm::add(const std::string& v, const Rat& c) {
  auto [it, fresh] = coeffs.emplace(v, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) coeffs.erase(it);
  } else if (c.is_zero()) {
    coeffs.erase(it);
  }
}

LinTerm& LinTerm::operator+=(const LinTerm& o) {
  for (const auto& [v, c] : o.coeffs) add(v, c);
  constant += o.constant;
  return *this;
}

LinTerm& LinTerm::operator-=(const LinTerm& o) {
  for (const auto& [v, c] : o.coeffs) add(v, -c);
  constant -= o.constant;
  return *this;
}

void LinTerm::scale(const Rat& c) {
  if (c.is_zero()) {
    coeffs.clear();
    constant = Rat(0);
    return;
  }
  for (auto& [v, k] : coeffs) k *= c;
  constant *= c;
}

LinTerm LinTerm::negated() const {
  LinTerm out = *this;
  out.scale(Rat(-1));
  return out;
}

LinTerm LinTerm::substituted(const std::string& var, const LinTerm& t) const {
  auto it = coeffs.find(var);
  if (it == coeffs.end()) return *this;
  Rat a = it->second;
  LinTerm out = *this;
  out.coeffs.erase(var);
  LinTerm scaled = t;
  scaled.scale(a);
  out += scaled;
  return out;
}

Rat LinTerm::eval(const std::map<std::string, Rat>& val) const {
  Rat out = constant;
  for (const auto& [v, c] : coeffs) out += c * val.at(v);
  return out;
}

namespace {

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

const NodePtr kTrue = make_node(Node{Node::Kind::True, {}, {}, {}});
const NodePtr kFalse = make_node(Node{Node::Kind::False, {}, {}, {}});

bool atom_eval_ground(const Atom& a, const Rat& value) {
  switch (a.kind) {
    case AtomKind::Lt: return value < Rat(0);
    case AtomKind::Le: return value <= Rat(0);
    case AtomKind::Eq: return value.is_zero();
    case AtomKind::Ne: return !value.is_zero();
    case AtomKind::Dvd:
    case AtomKind::Ndvd: {
      if (!value.is_integer()) return a.kind == AtomKind::Ndvd;
      bool divides = value.num() % a.modulus == 0;
      return a.kind == AtomKind::Dvd ? divides : !divides;
    }
  }
  return false;
}

}  // namespace

NodePtr mk_bool(bool b) { return b ? kTrue : kFalse; }

NodePtr mk_atom(Atom a) {
  // Scale to integer coefficients.
  std::int64_t scale = 1;
  auto fold_den = [&scale](const Rat& r) {
    std::int64_t g = std::gcd(scale, r.den());
    scale = synthmt::detail::narrow(__int128(scale) / g * r.den());
  };
  for (const auto& [v, c] : a.term.coeffs) fold_den(c);
  fold_den(a.term.constant);
  if (scale != 1) {
    a.term.scale(Rat(scale));
    if (a.kind == AtomKind::Dvd || a.kind == AtomKind::Ndvd)
      a.modulus = synthmt::detail::narrow(__int128(a.modulus) * scale);
  }

  if (a.term.is_constant()) return mk_bool(atom_eval_ground(a, a.term.constant));

  // Joint gcd reduction. For divisibility atoms, (d | g*t) <=> (d/gcd(d,g) | t).
  std::int64_t g = 0;
  for (const auto& [v, c] : a.term.coeffs) g = std::gcd(g, c.num());
  if (a.kind == AtomKind::Dvd || a.kind == AtomKind::Ndvd) {
    g = std::gcd(g, a.term.constant.num());
    if (g > 1) {
      a.term.scale(Rat(1, g));
      a.modulus /= std::gcd(a.modulus, g);
    }
    if (a.modulus <= 0) throw QeBudgetExceeded("divisibility modulus must be positive");
    if (a.modulus == 1) return mk_bool(a.kind == AtomKind::Dvd);
    // Fold the constant into [0, modulus).
    std::int64_t c = a.term.constant.num() % a.modulus;
    if (c < 0) c += a.modulus;
    a.term.constant = Rat(c);
  } else {
    g = std::gcd(g, a.term.constant.num());
    if (g > 1) a.term.scale(Rat(1, g));
  }

  // Sign convention for symmetric kinds: first coefficient positive.
  if (a.kind == AtomKind::Eq || a.kind == AtomKind::Ne || a.kind == AtomKind::Dvd ||
      a.kind == AtomKind::Ndvd) {
    if (a.term.coeffs.begin()->second.sign() < 0) {
      bool dvd = a.kind == AtomKind::Dvd || a.kind == AtomKind::Ndvd;
      a.term.scale(Rat(-1));
      if (dvd) {
        std::int64_t c = a.term.constant.num() % a.modulus;
        if (c < 0) c += a.modulus;
        a.term.constant = Rat(c);
      }
    }
  }

  return make_node(Node{Node::Kind::Leaf, std::move(a), {}, {}});
}

NodePtr mk_and(std::vector<NodePtr> kids) {
  std::vector<NodePtr> flat;
  for (auto& k : kids) {
    if (k->kind == Node::Kind::True) continue;
    if (k->kind == Node::Kind::False) return kFalse;
    if (k->kind == Node::Kind::And) {
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    } else {
      flat.push_back(std::move(k));
    }
  }
  // Deduplicate identical leaf atoms.
  std::vector<NodePtr> out;
  for (auto& k : flat) {
    bool dup = false;
    if (k->kind == Node::Kind::Leaf) {
      for (const auto& seen : out)
        if (seen->kind == Node::Kind::Leaf && seen->atom == k->atom) {
          dup = true;
          break;
        }
    }
    if (!dup) out.push_back(std::move(k));
  }
  if (out.empty()) return kTrue;
  if (out.size() == 1) return out[0];
  return make_node(Node{Node::Kind::And, {}, std::move(out), {}});
}

NodePtr mk_or(std::vector<NodePtr> kids) {
  std::vector<NodePtr> flat;
  for (auto& k : kids) {
    if (k->kind == Node::Kind::False) continue;
    if (k->kind == Node::Kind::True) return kTrue;
    if (k->kind == Node::Kind::Or) {
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    } else {
      flat.push_back(std::move(k));
    }
  }
  std::vector<NodePtr> out;
  for (auto& k : flat) {
    bool dup = false;
    if (k->kind == Node::Kind::Leaf) {
      for (const auto& seen : out)
        if (seen->kind == Node::Kind::Leaf && seen->atom == k->atom) {
          dup = true;
          break;
        }
    }
    if (!dup) out.push_back(std::move(k));
  }
  if (out.empty()) return kFalse;
  if (out.size() == 1) return out[0];
  return make_node(Node{Node::Kind::Or, {}, std::move(out), {}});
}

namespace {

Atom complement(const Atom& a) {
  Atom out = a;
  switch (a.kind) {
    case AtomKind::Lt:  // !(t < 0) <=> -t <= 0
      out.kind = AtomKind::Le;
      out.term = a.term.negated();
      break;
    case AtomKind::Le:  // !(t <= 0) <=> -t < 0
      out.kind = AtomKind::Lt;
      out.term = a.term.negated();
      break;
    case AtomKind::Eq: out.kind = AtomKind::Ne; break;
    case AtomKind::Ne: out.kind = AtomKind::Eq; break;
    case AtomKind::Dvd: out.kind = AtomKind::Ndvd; break;
    case AtomKind::Ndvd: out.kind = AtomKind::Dvd; break;
  }
  return out;
}

}  // namespace

NodePtr mk_not(NodePtr n) {
  switch (n->kind) {
    case Node::Kind::True: return kFalse;
    case Node::Kind::False: return kTrue;
    case Node::Kind::Leaf: return mk_atom(complement(n->atom));
    case Node::Kind::Not: return n->kids[0];
    default: return make_node(Node{Node::Kind::Not, {}, {std::move(n)}, {}});
  }
}

NodePtr mk_exists(std::vector<std::pair<std::string, VarSort>> vars, NodePtr body) {
  if (body->kind == Node::Kind::True || body->kind == Node::Kind::False) return body;
  std::erase_if(vars, [&body](const auto& v) { return !free_in(body, v.first); });
  if (vars.empty()) return body;
  return make_node(Node{Node::Kind::Exists, {}, {std::move(body)}, std::move(vars)});
}

NodePtr mk_forall(std::vector<std::pair<std::string, VarSort>> vars, NodePtr body) {
  if (body->kind == Node::Kind::True || body->kind == Node::Kind::False) return body;
  std::erase_if(vars, [&body](const auto& v) { return !free_in(body, v.first); });
  if (vars.empty()) return body;
  return make_node(Node{Node::Kind::Forall, {}, {std::move(body)}, std::move(vars)});
}

bool free_in(const NodePtr& n, const std::string& var) {
  switch (n->kind) {
    case Node::Kind::True:
    case Node::Kind::False: return false;
    case Node::Kind::Leaf: return n->atom.term.coeffs.count(var) != 0;
    case Node::Kind::Exists:
    case Node::Kind::Forall:
      for (const auto& [name, sort] : n->bound)
        if (name == var) return false;
      return free_in(n->kids[0], var);
    default:
      return std::any_of(n->kids.begin(), n->kids.end(),
                         [&](const NodePtr& k) { return free_in(k, var); });
  }
}

void collect_free_vars(const NodePtr& n, std::set<std::string>& out) {
  switch (n->kind) {
    case Node::Kind::True:
    case Node::Kind::False: return;
    case Node::Kind::Leaf:
      for (const auto& [v, c] : n->atom.term.coeffs) out.insert(v);
      return;
    case Node::Kind::Exists:
    case Node::Kind::Forall: {
      std::set<std::string> inner;
      collect_free_vars(n->kids[0], inner);
      for (const auto& [name, sort] : n->bound) inner.erase(name);
      out.insert(inner.begin(), inner.end());
      return;
    }
    default:
      for (const auto& k : n->kids) collect_free_vars(k, out);
  }
}

NodePtr substitute(const NodePtr& n, const std::string& var, const LinTerm& term) {
  switch (n->kind) {
    case Node::Kind::True:
    case Node::Kind::False: return n;
    case Node::Kind::Leaf: {
      if (!n->atom.term.coeffs.count(var)) return n;
      Atom a = n->atom;
      a.term = a.term.substituted(var, term);
      return mk_atom(std::move(a));
    }
    case Node::Kind::Exists:
    case Node::Kind::Forall: {
      for (const auto& [name, sort] : n->bound)
        if (name == var) return n;  // shadowed
      NodePtr body = substitute(n->kids[0], var, term);
      if (body == n->kids[0]) return n;
      auto vars = n->bound;
      return n->kind == Node::Kind::Exists ? mk_exists(std::move(vars), std::move(body))
                                           : mk_forall(std::move(vars), std::move(body));
    }
    case Node::Kind::Not: return mk_not(substitute(n->kids[0], var, term));
    case Node::Kind::And:
    case Node::Kind::Or: {
      std::vector<NodePtr> kids;
      kids.reserve(n->kids.size());
      for (const auto& k : n->kids) kids.push_back(substitute(k, var, term));
      return n->kind == Node::Kind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
  }
  return n;
}

NodePtr nnf(const NodePtr& n, bool negate) {
  switch (n->kind) {
    case Node::Kind::True: return mk_bool(!negate);
    case Node::Kind::False: return mk_bool(negate);
    case Node::Kind::Leaf: return negate ? mk_atom(complement(n->atom)) : n;
    case Node::Kind::Not: return nnf(n->kids[0], !negate);
    case Node::Kind::And:
    case Node::Kind::Or: {
      bool is_and = (n->kind == Node::Kind::And) != negate;
      std::vector<NodePtr> kids;
      kids.reserve(n->kids.size());
      for (const auto& k : n->kids) kids.push_back(nnf(k, negate));
      return is_and ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    case Node::Kind::Exists:
    case Node::Kind::Forall: {
      bool is_exists = (n->kind == Node::Kind::Exists) != negate;
      NodePtr body = nnf(n->kids[0], negate);
      auto vars = n->bound;
      return is_exists ? mk_exists(std::move(vars), std::move(body))
                       : mk_forall(std::move(vars), std::move(body));
    }
  }
  return n;
}

bool eval(const NodePtr& n, const std::map<std::string, Rat>& val) {
  switch (n->kind) {
    case Node::Kind::True: return true;
    case Node::Kind::False: return false;
    case Node::Kind::Leaf: return atom_eval_ground(n->atom, n->atom.term.eval(val));
    case Node::Kind::Not: return !eval(n->kids[0], val);
    case Node::Kind::And:
      return std::all_of(n->kids.begin(), n->kids.end(),
                         [&](const NodePtr& k) { return eval(k, val); });
    case Node::Kind::Or:
      return std::any_of(n->kids.begin(), n->kids.end(),
                         [&](const NodePtr& k) { return eval(k, val); });
    case Node::Kind::Exists:
    case Node::Kind::Forall:
      throw std::logic_error("eval on quantified node");
  }
  return false;
}

std::size_t node_count(const NodePtr& n) {
  std::size_t total = 1;
  for (const auto& k : n->kids) total += node_count(k);
  return total;
}

}  // namespace minismt

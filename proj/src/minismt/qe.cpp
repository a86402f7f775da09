#include "minismt/qe.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>

namespace minismt {

namespace {

constexpr std::int64_t kMaxCoefficientLcm = 1'000'000;
constexpr std::size_t kMaxExpansion = 200'000;

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  std::int64_t g = std::gcd(a, b);
  __int128 l = __int128(a) / g * b;
  if (l > kMaxCoefficientLcm) throw QeBudgetExceeded("coefficient lcm exceeds the QE budget");
  return static_cast<std::int64_t>(l);
}

void for_each_atom(const NodePtr& n, const std::function<void(const Atom&)>& fn) {
  if (n->kind == Node::Kind::Leaf) {
    fn(n->atom);
    return;
  }
  for (const auto& k : n->kids) for_each_atom(k, fn);
}

NodePtr map_atoms(const NodePtr& n, const std::function<NodePtr(const Atom&)>& fn) {
  switch (n->kind) {
    case Node::Kind::True:
    case Node::Kind::False: return n;
    case Node::Kind::Leaf: return fn(n->atom);
    case Node::Kind::And:
    case Node::Kind::Or: {
      std::vector<NodePtr> kids;
      kids.reserve(n->kids.size());
      for (const auto& k : n->kids) kids.push_back(map_atoms(k, fn));
      return n->kind == Node::Kind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    default: throw std::logic_error("map_atoms on non-NNF or quantified node");
  }
}

/// Shortcut: if f is a conjunction containing (a*var + r = 0) with a = ±1,
/// substitute var = -r/a everywhere. Sound for both sorts (the solved term is
/// integer-valued whenever the equation is satisfiable over Int).
NodePtr try_equality_shortcut(const std::string& var, const NodePtr& f) {
  const std::vector<NodePtr>* kids = nullptr;
  std::vector<NodePtr> single;
  if (f->kind == Node::Kind::And) {
    kids = &f->kids;
  } else if (f->kind == Node::Kind::Leaf) {
    single.push_back(f);
    kids = &single;
  } else {
    return nullptr;
  }
  for (size_t i = 0; i < kids->size(); ++i) {
    const NodePtr& k = (*kids)[i];
    if (k->kind != Node::Kind::Leaf || k->atom.kind != AtomKind::Eq) continue;
    Rat a = k->atom.term.coeff(var);
    if (!(a == Rat(1) || a == Rat(-1))) continue;
    LinTerm solved = k->atom.term;  // a*var + r = 0  =>  var = -r/a
    solved.coeffs.erase(var);
    solved.scale(Rat(-1) / a);
    std::vector<NodePtr> rest;
    for (size_t j = 0; j < kids->size(); ++j)
      if (j != i) rest.push_back(substitute((*kids)[j], var, solved));
    return mk_and(std::move(rest));
  }
  return nullptr;
}

}  // namespace

NodePtr eliminate_int(const std::string& var, const NodePtr& f_in) {
  NodePtr f = nnf(f_in);
  if (!free_in(f, var)) return f;
  if (NodePtr direct = try_equality_shortcut(var, f)) return direct;

  // lcm of |coefficients| of var.
  std::int64_t lambda = 1;
  for_each_atom(f, [&](const Atom& a) {
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return;
    if (!c.is_integer()) throw std::logic_error("non-integer coefficient in Int atom");
    lambda = lcm_checked(lambda, std::llabs(c.num()));
  });

  // Rescale so var's coefficient is +-lambda, then read it as a fresh unit
  // variable v' = lambda*var (recorded by the lambda | var conjunct below).
  // Le atoms over Int become strict: t <= 0  <=>  t - 1 < 0.
  NodePtr g = map_atoms(f, [&](const Atom& a) -> NodePtr {
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return mk_atom(a);
    std::int64_t m = lambda / std::llabs(c.num());
    Atom scaled = a;
    scaled.term.scale(Rat(m));
    if (scaled.kind == AtomKind::Dvd || scaled.kind == AtomKind::Ndvd)
      scaled.modulus = synthmt::detail::narrow(__int128(scaled.modulus) * m);
    Rat unit = scaled.term.coeff(var).sign() > 0 ? Rat(1) : Rat(-1);
    scaled.term.coeffs[var] = unit;
    if (scaled.kind == AtomKind::Le) {
      scaled.kind = AtomKind::Lt;
      scaled.term.constant -= Rat(1);
    }
    return mk_atom(std::move(scaled));
  });

  if (lambda > 1) {
    Atom dv;
    dv.kind = AtomKind::Dvd;
    dv.modulus = lambda;
    dv.term = LinTerm::of_var(var);
    g = mk_and({g, mk_atom(std::move(dv))});
  }

  // delta = lcm of divisibility moduli that involve var.
  std::int64_t delta = 1;
  for_each_atom(g, [&](const Atom& a) {
    if ((a.kind == AtomKind::Dvd || a.kind == AtomKind::Ndvd) && !a.term.coeff(var).is_zero())
      delta = lcm_checked(delta, a.modulus);
  });

  // B: lower-boundary terms (var > t  =>  t; var = t  =>  t-1; var != t  =>  t).
  std::vector<LinTerm> bset;
  auto add_b = [&bset](LinTerm t) {
    if (!std::count(bset.begin(), bset.end(), t)) bset.push_back(std::move(t));
  };
  for_each_atom(g, [&](const Atom& a) {
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return;
    LinTerm rest = a.term;
    rest.coeffs.erase(var);
    bool positive = c.sign() > 0;
    switch (a.kind) {
      case AtomKind::Lt:
        // +var + r < 0: upper bound, no contribution. -var + r < 0: var > r.
        if (!positive) add_b(rest);
        break;
      case AtomKind::Eq: {
        // +var + r = 0: var = -r; -var + r = 0: var = r.
        LinTerm t = positive ? rest.negated() : rest;
        t.constant -= Rat(1);
        add_b(std::move(t));
        break;
      }
      case AtomKind::Ne: {
        LinTerm t = positive ? rest.negated() : rest;
        add_b(std::move(t));
        break;
      }
      default: break;  // divisibility atoms contribute no bounds
    }
  });

  if (static_cast<std::size_t>(delta) * (bset.size() + 1) > kMaxExpansion)
    throw QeBudgetExceeded("Cooper expansion exceeds the QE budget");

  // f_minusinf: drop inequality/equality atoms at var -> -inf.
  NodePtr minusinf = map_atoms(g, [&](const Atom& a) -> NodePtr {
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return mk_atom(a);
    switch (a.kind) {
      case AtomKind::Lt: return mk_bool(c.sign() > 0);  // var < t true, var > t false
      case AtomKind::Eq: return mk_bool(false);
      case AtomKind::Ne: return mk_bool(true);
      default: return mk_atom(a);  // divisibility atoms stay (periodic)
    }
  });

  std::vector<NodePtr> cases;
  for (std::int64_t j = 1; j <= delta; ++j)
    cases.push_back(substitute(minusinf, var, LinTerm::of_const(Rat(j))));
  for (const LinTerm& b : bset) {
    for (std::int64_t j = 1; j <= delta; ++j) {
      LinTerm t = b;
      t.constant += Rat(j);
      cases.push_back(substitute(g, var, t));
    }
  }
  return mk_or(std::move(cases));
}

NodePtr eliminate_real(const std::string& var, const NodePtr& f_in) {
  NodePtr f = nnf(f_in);
  if (!free_in(f, var)) return f;
  if (NodePtr direct = try_equality_shortcut(var, f)) return direct;

  struct TestPoint {
    LinTerm value;
    bool plus_eps;
  };
  std::vector<TestPoint> points;
  auto add_point = [&points](LinTerm t, bool eps) {
    for (const auto& p : points)
      if (p.plus_eps == eps && p.value == t) return;
    points.push_back({std::move(t), eps});
  };

  for_each_atom(f, [&](const Atom& a) {
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return;
    if (a.kind == AtomKind::Dvd || a.kind == AtomKind::Ndvd)
      throw std::logic_error("divisibility atom under Real QE");
    // a.term = c*var + r  ==>  solved bound s = -r/c.
    LinTerm s = a.term;
    s.coeffs.erase(var);
    s.scale(Rat(-1) / c);
    bool positive = c.sign() > 0;
    switch (a.kind) {
      case AtomKind::Lt:
        if (!positive) add_point(std::move(s), true);  // var > s
        break;
      case AtomKind::Le:
        if (!positive) add_point(std::move(s), false);  // var >= s
        break;
      case AtomKind::Eq: add_point(std::move(s), false); break;
      case AtomKind::Ne: add_point(std::move(s), true); break;
      default: break;
    }
  });

  if (points.size() + 1 > kMaxExpansion) throw QeBudgetExceeded("virtual substitution budget");

  // var -> -inf
  NodePtr minusinf = map_atoms(f, [&](const Atom& a) -> NodePtr {
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return mk_atom(a);
    switch (a.kind) {
      case AtomKind::Lt:
      case AtomKind::Le: return mk_bool(c.sign() > 0);
      case AtomKind::Eq: return mk_bool(false);
      case AtomKind::Ne: return mk_bool(true);
      default: return mk_bool(false);
    }
  });

  std::vector<NodePtr> cases{minusinf};
  for (const TestPoint& p : points) {
    if (!p.plus_eps) {
      cases.push_back(substitute(f, var, p.value));
      continue;
    }
    // var -> s + epsilon: t = c*(s+eps) + r evaluates to (c*s + r) + c*eps.
    NodePtr inst = map_atoms(f, [&](const Atom& a) -> NodePtr {
      Rat c = a.term.coeff(var);
      if (c.is_zero()) return mk_atom(a);
      LinTerm t = a.term.substituted(var, p.value);
      switch (a.kind) {
        case AtomKind::Lt:
        case AtomKind::Le: {
          // t + c*eps < 0 (same for <=): t < 0, or t = 0 with c < 0.
          Atom out;
          out.kind = c.sign() < 0 ? AtomKind::Le : AtomKind::Lt;
          out.term = std::move(t);
          return mk_atom(std::move(out));
        }
        case AtomKind::Eq: return mk_bool(false);
        case AtomKind::Ne: return mk_bool(true);
        default: return mk_bool(false);
      }
    });
    cases.push_back(std::move(inst));
  }
  return mk_or(std::move(cases));
}

NodePtr eliminate_exists(const std::string& var, VarSort sort, const NodePtr& f) {
  return sort == VarSort::Int ? eliminate_int(var, f) : eliminate_real(var, f);
}

NodePtr eliminate_all_quantifiers(const NodePtr& f) {
  switch (f->kind) {
    case Node::Kind::True:
    case Node::Kind::False:
    case Node::Kind::Leaf: return f;
    case Node::Kind::Not: return mk_not(eliminate_all_quantifiers(f->kids[0]));
    case Node::Kind::And:
    case Node::Kind::Or: {
      std::vector<NodePtr> kids;
      kids.reserve(f->kids.size());
      for (const auto& k : f->kids) kids.push_back(eliminate_all_quantifiers(k));
      return f->kind == Node::Kind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    case Node::Kind::Exists: {
      NodePtr body = eliminate_all_quantifiers(f->kids[0]);
      for (auto it = f->bound.rbegin(); it != f->bound.rend(); ++it)
        body = eliminate_exists(it->first, it->second, body);
      return body;
    }
    case Node::Kind::Forall: {
      NodePtr body = eliminate_all_quantifiers(f->kids[0]);
      for (auto it = f->bound.rbegin(); it != f->bound.rend(); ++it)
        body = mk_not(eliminate_exists(it->first, it->second, mk_not(body)));
      return body;
    }
  }
  return f;
}

}  // namespace minismt

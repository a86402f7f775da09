#include "minismt/solver.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "minismt/qe.hpp"

namespace minismt {

void Context::declare(const std::string& name, VarSort sort) {
  if (is_declared(name)) throw std::invalid_argument("symbol '" + name + "' already declared");
  levels_.back().decls.emplace_back(name, sort);
  model_.reset();
}

bool Context::is_declared(const std::string& name) const { return sort_of(name).has_value(); }

std::optional<VarSort> Context::sort_of(const std::string& name) const {
  for (const auto& level : levels_)
    for (const auto& [n, s] : level.decls)
      if (n == name) return s;
  return std::nullopt;
}

void Context::assert_node(NodePtr n) {
  levels_.back().asserts.push_back(std::move(n));
  model_.reset();
}

void Context::push(unsigned n) {
  for (unsigned i = 0; i < n; ++i) levels_.emplace_back();
  model_.reset();
}

void Context::pop(unsigned n) {
  if (n >= levels_.size()) throw std::invalid_argument("pop below the bottom of the stack");
  for (unsigned i = 0; i < n; ++i) levels_.pop_back();
  model_.reset();
}

void Context::reset() {
  levels_.clear();
  levels_.emplace_back();
  model_.reset();
}

namespace {

struct Boundary {
  Rat value;
};

void collect_boundaries(const NodePtr& n, const std::string& var, std::vector<Rat>& bounds,
                        std::int64_t& delta) {
  if (n->kind == Node::Kind::Leaf) {
    const Atom& a = n->atom;
    Rat c = a.term.coeff(var);
    if (c.is_zero()) return;
    if (a.kind == AtomKind::Dvd || a.kind == AtomKind::Ndvd) {
      std::int64_t g = std::gcd(delta, a.modulus);
      delta = synthmt::detail::narrow(__int128(delta) / g * a.modulus);
      return;
    }
    // c*var + r ⋈ 0 crosses at var = -r/c.
    LinTerm rest = a.term;
    rest.coeffs.erase(var);
    bounds.push_back(-rest.constant / c);
    return;
  }
  for (const auto& k : n->kids) collect_boundaries(k, var, bounds, delta);
}

}  // namespace

Rat pick_value(const std::string& var, VarSort sort, const NodePtr& f) {
  std::vector<Rat> bounds;
  std::int64_t delta = 1;
  collect_boundaries(f, var, bounds, delta);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::map<std::string, Rat> val;
  auto sat_at = [&](const Rat& v) {
    val[var] = v;
    return eval(f, val);
  };

  if (sort == VarSort::Int) {
    if (delta > 100000) throw QeBudgetExceeded("divisibility period too large for model search");
    std::set<std::int64_t> candidates;
    auto window = [&candidates, delta](std::int64_t center) {
      for (std::int64_t j = -delta - 1; j <= delta + 1; ++j) candidates.insert(center + j);
    };
    window(0);
    for (const Rat& b : bounds) {
      window(b.floor());
      window(b.ceil());
    }
    for (std::int64_t c : candidates)
      if (sat_at(Rat(c))) return Rat(c);
  } else {
    std::vector<Rat> candidates;
    candidates.push_back(Rat(0));
    for (size_t i = 0; i < bounds.size(); ++i) {
      candidates.push_back(bounds[i]);
      if (i + 1 < bounds.size()) candidates.push_back((bounds[i] + bounds[i + 1]) / Rat(2));
    }
    if (!bounds.empty()) {
      candidates.push_back(bounds.front() - Rat(1));
      candidates.push_back(bounds.back() + Rat(1));
    }
    for (const Rat& c : candidates)
      if (sat_at(c)) return c;
  }
  throw std::logic_error("model search exhausted candidates on a satisfiable formula");
}

CheckResult Context::check_sat() {
  model_.reset();
  std::vector<NodePtr> all;
  std::vector<std::pair<std::string, VarSort>> decls;
  for (const auto& level : levels_) {
    all.insert(all.end(), level.asserts.begin(), level.asserts.end());
    decls.insert(decls.end(), level.decls.begin(), level.decls.end());
  }
  try {
    NodePtr phi = eliminate_all_quantifiers(mk_and(std::move(all)));

    // Chain of projections: phis[i] is quantifier-free over decls[0..i).
    size_t n = decls.size();
    std::vector<NodePtr> phis(n + 1);
    phis[n] = phi;
    for (size_t i = n; i > 0; --i)
      phis[i - 1] = eliminate_exists(decls[i - 1].first, decls[i - 1].second, phis[i]);

    if (!eval(phis[0], {})) return CheckResult::Unsat;

    std::map<std::string, Rat> model;
    for (size_t i = 1; i <= n; ++i) {
      NodePtr univariate = phis[i];
      for (size_t j = 0; j + 1 < i; ++j)
        univariate = substitute(univariate, decls[j].first, LinTerm::of_const(model[decls[j].first]));
      model[decls[i - 1].first] =
          pick_value(decls[i - 1].first, decls[i - 1].second, univariate);
    }
    model_ = std::move(model);
    return CheckResult::Sat;
  } catch (const QeBudgetExceeded&) {
    return CheckResult::Unknown;
  } catch (const synthmt::OverflowError&) {
    return CheckResult::Unknown;
  }
}

}  // namespace minismt

#include "synthmt/oracle.hpp"

#include <algorithm>
#include <set>

#include "synthmt/errors.hpp"

namespace synthmt {

std::vector<Value> window_points(Window w, Sort sort) {
  if (w.bound < 1) throw ContractViolation("window bound must be at least 1");
  std::vector<Value> out;
  if (sort == Sort::Int) {
    for (std::int64_t v = -w.bound; v <= w.bound; ++v) out.push_back(Rational(v));
  } else {
    for (std::int64_t k = -2 * w.bound; k <= 2 * w.bound; ++k) out.push_back(Rational(k, 2));
  }
  return out;
}

namespace {

struct IntervalState {
  std::optional<Rational> lo, hi;
  bool lo_strict = false, hi_strict = false;
  std::vector<Rational> pins;
  std::vector<Rational> excluded;

  void add_lower(const Rational& b, bool strict) {
    if (!lo || b > *lo || (b == *lo && strict)) {
      lo = b;
      lo_strict = strict;
    }
  }
  void add_upper(const Rational& b, bool strict) {
    if (!hi || b < *hi || (b == *hi && strict)) {
      hi = b;
      hi_strict = strict;
    }
  }

  bool point_ok(const Rational& p) const {
    if (lo && (p < *lo || (lo_strict && p == *lo))) return false;
    if (hi && (p > *hi || (hi_strict && p == *hi))) return false;
    return !std::count(excluded.begin(), excluded.end(), p);
  }
};

/// Feasibility of a conjunction over one variable, exactly.
bool single_var_feasible(const IntervalState& st, Sort sort) {
  if (!st.pins.empty()) {
    const Rational& p = st.pins.front();
    for (const Rational& q : st.pins)
      if (!(q == p)) return false;
    if (sort == Sort::Int && !p.is_integer()) return false;
    return st.point_ok(p);
  }
  if (sort == Sort::Real) {
    if (!st.lo || !st.hi) return true;  // dense and unbounded on a side
    if (*st.lo > *st.hi) return false;
    if (*st.lo == *st.hi) {
      if (st.lo_strict || st.hi_strict) return false;
      return st.point_ok(*st.lo);
    }
    return true;  // nondegenerate interval minus finitely many points
  }
  // Int
  if (!st.lo && !st.hi) return true;
  if (!st.lo || !st.hi) {
    // One-sided unbounded: infinitely many integers, finitely many excluded.
    return true;
  }
  std::int64_t lo_i = st.lo_strict ? st.lo->floor() + 1 : st.lo->ceil();
  std::int64_t hi_i = st.hi_strict ? st.hi->ceil() - 1 : st.hi->floor();
  if (lo_i > hi_i) return false;
  __int128 count = __int128(hi_i) - lo_i + 1;
  if (count > static_cast<__int128>(st.excluded.size())) return true;
  for (std::int64_t v = lo_i; v <= hi_i; ++v)
    if (st.point_ok(Rational(v))) return true;
  return false;
}

/// Residual constraints of a cube after substituting the env point; nullopt
/// when a ground conjunct is already false.
std::optional<std::vector<Literal>> residuals_at(const Cube& c, const Valuation& env,
                                                 std::span<const Literal> lits,
                                                 const std::set<std::string>& sys_set) {
  std::vector<Literal> out;
  for (const Literal& l : cube_formula(c, lits)) {
    GroundedLiteral g = ground(l, env, sys_set);
    if (g.is_ground()) {
      if (!g.truth) return std::nullopt;
    } else {
      out.push_back(std::move(*g.residual));
    }
  }
  return out;
}

bool single_var_cube_feasible(const std::vector<Literal>& residuals, const std::string& var,
                              Sort sort) {
  IntervalState st;
  for (const Literal& l : residuals) {
    auto it = l.coeffs().find(var);
    if (it == l.coeffs().end()) throw ContractViolation("residual without the system variable");
    Rational a(it->second);
    Rational bound = Rational(l.constant()) / a;
    bool positive = a.sign() > 0;
    switch (l.relop()) {
      case RelOp::Lt:
        if (positive) st.add_upper(bound, true);
        else st.add_lower(bound, true);
        break;
      case RelOp::Le:
        if (positive) st.add_upper(bound, false);
        else st.add_lower(bound, false);
        break;
      case RelOp::Eq: st.pins.push_back(bound); break;
      case RelOp::Ne: st.excluded.push_back(bound); break;
      default: throw ContractViolation("non-canonical relop in residual");
    }
  }
  return single_var_feasible(st, sort);
}

/// Widened grid for multi-variable fallback enumeration.
std::vector<Value> widened_grid(std::span<const Literal> lits, Sort sort, Window w) {
  std::int64_t maxc = 1, maxk = 0;
  for (const Literal& l : lits) {
    for (const auto& [name, c] : l.coeffs())
      maxc = std::max(maxc, static_cast<std::int64_t>(std::llabs(c)));
    maxk = std::max(maxk, static_cast<std::int64_t>(std::llabs(l.constant())));
  }
  std::int64_t range = w.bound * maxc + maxk + 1;
  std::vector<Value> out;
  if (sort == Sort::Int) {
    for (std::int64_t v = -range; v <= range; ++v) out.push_back(Rational(v));
  } else {
    for (std::int64_t k = -2 * range; k <= 2 * range; ++k) out.push_back(Rational(k, 2));
  }
  return out;
}

bool multi_var_cube_feasible(const std::vector<Literal>& residuals,
                             const std::vector<std::string>& sys_vars, Sort sort,
                             std::span<const Literal> lits, Window w) {
  std::vector<Value> grid = widened_grid(lits, sort, w);
  double total = 1;
  for (size_t i = 0; i < sys_vars.size(); ++i) total *= static_cast<double>(grid.size());
  if (total > 4e6)
    throw ContractViolation("oracle enumeration over this many system variables is too large");

  std::vector<size_t> idx(sys_vars.size(), 0);
  Valuation v;
  while (true) {
    for (size_t i = 0; i < sys_vars.size(); ++i) v[sys_vars[i]] = grid[idx[i]];
    bool all = true;
    for (const Literal& l : residuals)
      if (!eval_ground(l, v)) {
        all = false;
        break;
      }
    if (all) return true;
    size_t d = 0;
    while (d < idx.size() && ++idx[d] == grid.size()) idx[d++] = 0;
    if (d == idx.size()) return false;
  }
}

}  // namespace

bool oracle_cube_feasible(const Cube& c, const Valuation& env, std::span<const Literal> lits,
                          const std::vector<std::string>& sys_vars, Sort sort, Window w) {
  std::set<std::string> sys_set(sys_vars.begin(), sys_vars.end());
  auto residuals = residuals_at(c, env, lits, sys_set);
  if (!residuals) return false;
  if (residuals->empty()) return true;
  if (sys_vars.size() == 1) return single_var_cube_feasible(*residuals, sys_vars[0], sort);
  return multi_var_cube_feasible(*residuals, sys_vars, sort, lits, w);
}

ReactionSet oracle_reaction(const Valuation& env, std::span<const Literal> lits,
                            const std::vector<std::string>& sys_vars, Sort sort, Window w) {
  ReactionSet r;
  const std::uint32_t count = 1u << lits.size();
  for (std::uint32_t c = 0; c < count; ++c)
    if (oracle_cube_feasible(Cube{c}, env, lits, sys_vars, sort, w)) r.insert(c);
  return r;
}

namespace {

std::vector<Valuation> env_grid(const std::vector<std::string>& env_vars, Sort sort, Window w) {
  std::vector<Value> points = window_points(w, sort);
  double total = 1;
  for (size_t i = 0; i < env_vars.size(); ++i) total *= static_cast<double>(points.size());
  if (total > 200000) throw ContractViolation("oracle env grid too large");
  std::vector<Valuation> out;
  std::vector<size_t> idx(env_vars.size(), 0);
  while (true) {
    Valuation v;
    for (size_t i = 0; i < env_vars.size(); ++i) v[env_vars[i]] = points[idx[i]];
    out.push_back(std::move(v));
    size_t d = 0;
    while (d < idx.size() && ++idx[d] == points.size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return out;
}

void check_boundary_interior(const ReactionMap& map, const std::vector<std::string>& env_vars,
                             Sort sort, Window w) {
  auto find = [&map](const Valuation& v) -> const ReactionSet* {
    for (const auto& [p, r] : map)
      if (p == v) return &r;
    return nullptr;
  };
  Rational step = sort == Sort::Int ? Rational(1) : Rational(1, 2);
  Rational edge(w.bound);
  for (const auto& [p, r] : map) {
    for (const std::string& var : env_vars) {
      const Rational& x = p.at(var);
      if (x == edge || x == -edge) {
        Valuation inner = p;
        inner[var] = x == edge ? x - step : x + step;
        const ReactionSet* ir = find(inner);
        if (ir && !(*ir == r))
          throw WindowTooSmall("partition boundary touches the window edge at " + var + "=" +
                               x.to_string());
      }
    }
  }
}

}  // namespace

ReactionMap oracle_reaction_map(std::span<const Literal> lits,
                                const std::vector<std::string>& env_vars,
                                const std::vector<std::string>& sys_vars, Sort sort, Window w) {
  ReactionMap map;
  for (Valuation& v : env_grid(env_vars, sort, w)) {
    ReactionSet r = oracle_reaction(v, lits, sys_vars, sort, w);
    map.emplace_back(std::move(v), std::move(r));
  }
  check_boundary_interior(map, env_vars, sort, w);
  return map;
}

OracleVerdict oracle_realizability(const SpecAst& ast, Window w) {
  std::vector<Literal> lits = extract_literals(ast);
  SafetyMatrix matrix = normalize_safety(ast);
  ReactionMap map = oracle_reaction_map(lits, ast.env_vars, ast.sys_vars, ast.sort, w);

  std::set<ReactionSet> menus;
  for (const auto& [p, r] : map) {
    if (r.empty())
      throw WindowTooSmall("window point with no achievable cube (under-approximation)");
    menus.insert(r);
  }

  // States: one per previous truth vector, plus init at index 2^L.
  const int L = static_cast<int>(lits.size());
  const int cube_count = 1 << L;
  const int init = cube_count;
  std::vector<char> win(cube_count + 1, 1);
  std::vector<char> next(cube_count + 1, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s <= cube_count; ++s) {
      if (!win[s]) {
        next[s] = 0;
        continue;
      }
      next[s] = 1;
      for (const ReactionSet& menu : menus) {
        bool escape = false;
        for (std::uint32_t c : menu.cubes) {
          if (!win[c]) continue;
          if (s == init || matrix.eval(static_cast<std::uint32_t>(s), c)) {
            escape = true;
            break;
          }
        }
        if (!escape) {
          next[s] = 0;
          changed = true;
          break;
        }
      }
    }
    std::swap(win, next);
  }
  return win[init] ? OracleVerdict::Realizable : OracleVerdict::Unrealizable;
}

}  // namespace synthmt

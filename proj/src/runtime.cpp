#include "synthmt/runtime.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "json.hpp"
#include "synthmt/errors.hpp"

namespace synthmt {

namespace {

const PolicyRule kAnyRule{};

}  // namespace

Policy Policy::parse(const std::string& text, Sort sort,
                     const std::vector<std::string>& sys_vars) {
  Policy p;
  if (text.empty()) return p;
  std::istringstream ss(text);
  std::string entry;
  while (std::getline(ss, entry, ',')) {
    if (entry.empty()) continue;
    auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw ContractViolation("policy entry '" + entry + "' is not RULE:VAR");
    std::string rule = entry.substr(0, colon);
    std::string rest = entry.substr(colon + 1);
    std::string var = rest;
    PolicyRule r;
    if (rule == "any") {
      r.kind = PolicyRule::Kind::Any;
    } else if (rule == "min" || rule == "max") {
      if (sort != Sort::Int)
        throw ContractViolation("policy '" + rule +
                                "' needs the Int sort (least/greatest models may not exist "
                                "over Real)");
      r.kind = rule == "min" ? PolicyRule::Kind::Min : PolicyRule::Kind::Max;
    } else if (rule == "target") {
      auto eq = rest.find('=');
      if (eq == std::string::npos)
        throw ContractViolation("target policy needs target:VAR=VALUE or target:VAR=prev");
      var = rest.substr(0, eq);
      std::string value = rest.substr(eq + 1);
      if (value == "prev") {
        r.kind = PolicyRule::Kind::TargetPrev;
      } else {
        r.kind = PolicyRule::Kind::TargetValue;
        r.target = Rational::parse(value);
        if (sort == Sort::Int && !r.target.is_integer())
          throw ContractViolation("target value '" + value + "' is not an integer");
      }
    } else {
      throw ContractViolation("unknown policy rule '" + rule + "'");
    }
    if (!std::count(sys_vars.begin(), sys_vars.end(), var))
      throw ContractViolation("policy names unknown system variable '" + var + "'");
    if (p.rules.count(var))
      throw ContractViolation("duplicate policy entry for variable '" + var + "'");
    p.rules[var] = r;
  }
  return p;
}

const PolicyRule& Policy::rule(const std::string& var) const {
  auto it = rules.find(var);
  return it == rules.end() ? kAnyRule : it->second;
}

std::string trace_step_json(const TraceStep& ts) {
  nlohmann::ordered_json j;
  j["step"] = ts.step;
  nlohmann::ordered_json in;
  for (const auto& [name, value] : ts.input) in[name] = value.to_string();
  j["in"] = std::move(in);
  j["partition"] = ts.partition;
  j["cube"] = ts.cube;
  nlohmann::ordered_json out;
  for (const auto& [name, value] : ts.output) out[name] = value.to_string();
  j["out"] = std::move(out);
  j["verdict"] = ts.violation ? "violation " + *ts.violation : "ok";
  if (ts.capped) j["capped"] = true;
  return j.dump();
}

Valuation parse_assignment_line(const std::string& line, const std::vector<std::string>& vars,
                                Sort sort) {
  Valuation v;
  std::istringstream ss(line);
  std::string part;
  while (ss >> part) {
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw ContractViolation("assignment '" + part + "' is not VAR=VALUE");
    std::string name = part.substr(0, eq);
    v[name] = Rational::parse(part.substr(eq + 1));
  }
  validate_valuation(v, vars, sort, "environment");
  return v;
}

int classify_input(const Valuation& v, const BooleanSpec& spec, Session& session) {
  validate_valuation(v, spec.env_vars, spec.sort, "environment");
  ReactionSet reaction = compute_reaction(v, spec.literals, spec.sys_vars, session);
  for (const Partition& p : spec.partitions)
    if (p.reaction == reaction) return p.id;
  throw AbstractionIncomplete(
      "input matches no stored partition (corrupted artifact or sort mismatch)");
}

namespace {

Literal bound_literal(const std::string& var, const Value& value, bool upper) {
  return Literal::make({{var, Rational(1)}}, upper ? RelOp::Le : RelOp::Ge, value);
}

Literal pin_literal(const std::string& var, const Value& value) {
  return Literal::make({{var, Rational(1)}}, RelOp::Eq, value);
}

struct GroundedCube {
  std::vector<Formula> constraints;  // residual conjuncts over sys variables
};

GroundedCube ground_cube(const Cube& c, const Valuation& v, const BooleanSpec& spec) {
  std::set<std::string> sys_set(spec.sys_vars.begin(), spec.sys_vars.end());
  GroundedCube out;
  for (const Literal& l : cube_formula(c, spec.literals)) {
    GroundedLiteral g = ground(l, v, sys_set);
    if (g.is_ground()) {
      if (!g.truth)
        throw ProviderUnsat("controller-issued cube is ground-false at this input");
    } else {
      out.constraints.push_back(Formula::lit(std::move(*g.residual)));
    }
  }
  return out;
}

}  // namespace

ProvideResult provide_output(const Cube& c, const Valuation& v, const Policy& policy,
                             const std::optional<Valuation>& prev, const BooleanSpec& spec,
                             Session& session, const RuntimeOptions& opts) {
  GroundedCube grounded = ground_cube(c, v, spec);
  std::vector<Formula> constraints = grounded.constraints;

  auto solve = [&](const std::vector<Formula>& extra) {
    std::vector<Formula> all = constraints;
    all.insert(all.end(), extra.begin(), extra.end());
    SatResult r = session.solve_exists(spec.sys_vars, Formula::conj(std::move(all)));
    if (r.status == SatStatus::Unknown)
      throw SolverUnknown("solver could not decide a provider query");
    return r;
  };

  SatResult base = solve({});
  if (!base.is_sat())
    throw ProviderUnsat("controller-issued cube has no model (corrupted artifact)");

  ProvideResult result;
  std::vector<Formula> pins;

  for (const std::string& y : spec.sys_vars) {
    const PolicyRule& rule = policy.rule(y);
    switch (rule.kind) {
      case PolicyRule::Kind::Any: break;
      case PolicyRule::Kind::TargetValue:
      case PolicyRule::Kind::TargetPrev: {
        Value t;
        if (rule.kind == PolicyRule::Kind::TargetValue) {
          t = rule.target;
        } else {
          if (!prev || !prev->count(y)) break;  // no previous output yet: any model
          t = prev->at(y);
        }
        std::vector<Formula> attempt = pins;
        attempt.push_back(Formula::lit(pin_literal(y, t)));
        if (solve(attempt).is_sat()) pins = std::move(attempt);
        break;  // target infeasible: fall back to any model
      }
      case PolicyRule::Kind::Min:
      case PolicyRule::Kind::Max: {
        const bool is_min = rule.kind == PolicyRule::Kind::Min;
        SatResult first = solve(pins);
        if (!first.is_sat())
          throw InvariantViolation("pinned provider constraints became unsatisfiable");
        const std::int64_t origin = first.model.at(y).num();
        std::int64_t best = origin;
        auto probe = [&](std::int64_t bound_value) {
          std::vector<Formula> q = pins;
          q.push_back(Formula::lit(bound_literal(y, Rational(bound_value), is_min)));
          SatResult r = solve(q);
          if (r.is_sat()) {
            std::int64_t got = r.model.at(y).num();
            best = is_min ? std::min(best, got) : std::max(best, got);
            return true;
          }
          return false;
        };

        // Exponential probing away from the first model, capped.
        std::int64_t dist = 1;
        bool hit_cap = false;
        bool found_unsat = false;
        while (true) {
          if (dist > opts.optimization_cap) dist = opts.optimization_cap;
          std::int64_t bound = is_min ? origin - dist : origin + dist;
          if (!probe(bound)) {
            found_unsat = true;
            break;
          }
          if (dist == opts.optimization_cap) {
            hit_cap = true;
            break;
          }
          dist *= 2;
        }
        if (found_unsat) {
          // Optimum lies strictly inside (bound, best]; binary search.
          std::int64_t lo = (is_min ? origin - dist : best) + 1;
          std::int64_t hi = (is_min ? best : origin + dist) - 1;
          while (lo <= hi) {
            std::int64_t mid = lo + (hi - lo) / 2;
            if (is_min) {
              if (probe(mid)) hi = best - 1;
              else lo = mid + 1;
            } else {
              if (probe(mid)) lo = best + 1;
              else hi = mid - 1;
            }
          }
          if (opts.verify_extrema) {
            std::vector<Formula> q = pins;
            q.push_back(Formula::lit(bound_literal(y, Rational(is_min ? best - 1 : best + 1),
                                                   is_min)));
            if (solve(q).is_sat())
              throw InvariantViolation("optimized value is not extremal");
          }
        } else {
          result.capped = result.capped || hit_cap;
        }
        pins.push_back(Formula::lit(pin_literal(y, Rational(best))));
        break;
      }
    }
  }

  SatResult final_model = pins.empty() ? std::move(base) : solve(pins);
  if (!final_model.is_sat())
    throw InvariantViolation("pinned provider constraints became unsatisfiable");
  result.output = std::move(final_model.model);
  return result;
}

std::optional<std::string> monitor_step(std::optional<std::uint32_t> prev_bits,
                                        std::uint32_t cur_bits, const SafetyMatrix& matrix) {
  if (!prev_bits) return std::nullopt;  // deferred to the next pair, like the game's init
  int i = matrix.first_violation(*prev_bits, cur_bits);
  if (i < 0) return std::nullopt;
  return matrix.conjunct_text(i);
}

Engine::Engine(MealyController controller, Session& session, Policy policy, RuntimeOptions opts)
    : controller_(std::move(controller)),
      session_(session),
      policy_(std::move(policy)),
      opts_(opts),
      state_(controller_.initial) {
  if (!controller_.realizable)
    throw ContractViolation("cannot run an unrealizable controller artifact");
  if (session_.config().sort != controller_.spec.sort)
    throw ContractViolation("session sort does not match the controller artifact");
}

TraceStep Engine::step(const Valuation& input) {
  const BooleanSpec& spec = controller_.spec;
  int k = classify_input(input, spec, session_);

  auto it = controller_.delta.find({state_, k});
  if (it == controller_.delta.end())
    throw InvariantViolation("controller has no move for the current state and input");
  const auto [cube_index, next_state] = it->second;
  Cube cube{cube_index};

  ProvideResult provided =
      provide_output(cube, input, policy_, prev_output_, spec, session_, opts_);

  Valuation full = input;
  for (const auto& [name, value] : provided.output) full[name] = value;
  std::uint32_t bits = 0;
  for (int i = 0; i < spec.num_literals(); ++i)
    if (eval_ground(spec.literals[i], full)) bits |= 1u << i;
  if (bits != cube_index)
    throw InvariantViolation("provider output does not realize the chosen cube");

  TraceStep ts;
  ts.step = ++steps_done_;
  ts.input = input;
  ts.partition = k;
  ts.cube = cube_index;
  ts.output = provided.output;
  ts.capped = provided.capped;
  ts.violation = monitor_step(prev_bits_, bits, spec.matrix);

  state_ = next_state;
  prev_output_ = provided.output;
  prev_bits_ = bits;
  return ts;
}

std::vector<TraceStep> Engine::run_trace(std::span<const Valuation> inputs) {
  std::vector<TraceStep> out;
  out.reserve(inputs.size());
  for (const Valuation& v : inputs) out.push_back(step(v));
  return out;
}

std::vector<TraceStep> Engine::run_random(int steps, std::uint64_t seed, std::int64_t window) {
  if (window < 1) throw ContractViolation("random window must be at least 1");
  std::mt19937_64 rng(seed);
  const BooleanSpec& spec = controller_.spec;
  std::vector<TraceStep> out;
  out.reserve(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    Valuation v;
    for (const std::string& name : spec.env_vars) {
      if (spec.sort == Sort::Int) {
        std::int64_t span = 2 * window + 1;
        v[name] = Rational(static_cast<std::int64_t>(rng() % span) - window);
      } else {
        std::int64_t span = 4 * window + 1;
        v[name] = Rational(static_cast<std::int64_t>(rng() % span) - 2 * window, 2);
      }
    }
    out.push_back(step(v));
  }
  return out;
}

}  // namespace synthmt

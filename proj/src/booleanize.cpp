#include "synthmt/booleanize.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "synthmt/errors.hpp"

namespace synthmt {

void ReactionSet::insert(std::uint32_t c) {
  auto it = std::lower_bound(cubes.begin(), cubes.end(), c);
  if (it == cubes.end() || *it != c) cubes.insert(it, c);
}

bool ReactionSet::contains(std::uint32_t c) const {
  return std::binary_search(cubes.begin(), cubes.end(), c);
}

ReactionSet compute_reaction(const Valuation& v, std::span<const Literal> lits,
                             const std::vector<std::string>& sys_vars, Session& session) {
  if (lits.empty() || lits.size() >= 24)
    throw ContractViolation("literal list size out of supported range");
  std::set<std::string> sys_set(sys_vars.begin(), sys_vars.end());
  ReactionSet reaction;
  const std::uint32_t count = 1u << lits.size();
  for (std::uint32_t c = 0; c < count; ++c) {
    std::vector<Formula> residuals;
    bool feasible = true;
    for (const Literal& l : cube_formula(Cube{c}, lits)) {
      GroundedLiteral g = ground(l, v, sys_set);
      if (g.is_ground()) {
        if (!g.truth) {
          feasible = false;
          break;
        }
      } else {
        residuals.push_back(Formula::lit(std::move(*g.residual)));
      }
    }
    if (!feasible) continue;
    if (residuals.empty()) {
      reaction.insert(c);
      continue;
    }
    SatResult r = session.solve_exists(sys_vars, Formula::conj(std::move(residuals)));
    if (r.status == SatStatus::Unknown)
      throw SolverUnknown("solver could not decide a cube feasibility query");
    if (r.is_sat()) reaction.insert(c);
  }
  return reaction;
}

Formula characteristic_condition(const ReactionSet& reaction, std::span<const Literal> lits,
                                 const std::vector<std::string>& sys_vars) {
  std::vector<Formula> kids;
  const std::uint32_t count = 1u << lits.size();
  for (std::uint32_t c = 0; c < count; ++c) {
    Formula body = cube_conjunction(Cube{c}, lits);
    if (reaction.contains(c)) {
      kids.push_back(Formula::exists(sys_vars, std::move(body)));
    } else {
      kids.push_back(Formula::forall(sys_vars, Formula::negate(std::move(body))));
    }
  }
  return Formula::conj(std::move(kids));
}

std::vector<Partition> discover_partitions(std::span<const Literal> lits,
                                           const std::vector<std::string>& env_vars,
                                           const std::vector<std::string>& sys_vars,
                                           Session& session) {
  std::vector<Partition> found;
  // Termination: each round discovers a fresh reaction set, of which there
  // are at most 2^(2^L); a hard cap keeps pathological runs bounded.
  const size_t hard_cap = 4096;
  while (true) {
    std::vector<Formula> off_known;
    for (const Partition& p : found)
      off_known.push_back(
          Formula::negate(characteristic_condition(p.reaction, lits, sys_vars)));
    SatResult r = session.check_quantified(env_vars, Formula::conj(std::move(off_known)));
    if (r.status == SatStatus::Unknown)
      throw AbstractionAborted("solver returned unknown during partition discovery");
    if (r.status == SatStatus::Unsat) break;  // cover established

    ReactionSet reaction = compute_reaction(r.model, lits, sys_vars, session);
    if (reaction.empty())
      throw InvariantViolation("input with empty reaction set: abstraction bug");
    for (const Partition& p : found)
      if (p.reaction == reaction)
        throw InvariantViolation("rediscovered a known reaction set: unsound solver reply");
    Partition p;
    p.reaction = std::move(reaction);
    p.witness = std::move(r.model);
    found.push_back(std::move(p));
    if (found.size() > hard_cap)
      throw AbstractionAborted("partition discovery exceeded the hard cap");
  }
  if (found.empty())
    throw InvariantViolation("no partitions discovered: environment domain empty?");

  // Pairwise disjointness of the characteristic conditions.
  for (size_t i = 0; i < found.size(); ++i) {
    for (size_t j = i + 1; j < found.size(); ++j) {
      Formula both = Formula::conj({characteristic_condition(found[i].reaction, lits, sys_vars),
                                    characteristic_condition(found[j].reaction, lits, sys_vars)});
      SatResult r = session.check_quantified(env_vars, both);
      if (r.status == SatStatus::Unknown)
        throw AbstractionAborted("solver returned unknown during the disjointness check");
      if (r.status == SatStatus::Sat)
        throw InvariantViolation("partition regions overlap: abstraction bug");
    }
  }

  std::sort(found.begin(), found.end(),
            [](const Partition& a, const Partition& b) { return a.reaction < b.reaction; });
  for (size_t i = 0; i < found.size(); ++i) found[i].id = static_cast<int>(i);
  return found;
}

BooleanSpec emit_boolean_spec(Sort sort, std::vector<std::string> env_vars,
                              std::vector<std::string> sys_vars, std::vector<Literal> literals,
                              SafetyMatrix matrix, std::vector<Partition> partitions) {
  if (partitions.empty()) throw ContractViolation("BooleanSpec needs at least one partition");
  if (literals.empty()) throw ContractViolation("BooleanSpec needs at least one literal");
  for (const Partition& p : partitions)
    if (p.reaction.empty())
      throw InvariantViolation("partition with empty reaction set: abstraction bug");
  BooleanSpec b;
  b.sort = sort;
  b.env_vars = std::move(env_vars);
  b.sys_vars = std::move(sys_vars);
  b.literals = std::move(literals);
  b.matrix = std::move(matrix);
  b.partitions = std::move(partitions);
  return b;
}

BooleanSpec booleanize(const SpecAst& ast, Session& session) {
  std::vector<Literal> lits = extract_literals(ast);
  SafetyMatrix matrix = normalize_safety(ast);
  std::vector<Partition> parts = discover_partitions(lits, ast.env_vars, ast.sys_vars, session);
  return emit_boolean_spec(ast.sort, ast.env_vars, ast.sys_vars, std::move(lits),
                           std::move(matrix), std::move(parts));
}

namespace {

/// Presentation order for reaction disjunctions: most-positive cube first
/// (polarity of literal 0 outranks literal 1, positive before negative).
std::vector<std::uint32_t> presentation_order(const ReactionSet& r, int L) {
  std::vector<std::uint32_t> out = r.cubes;
  auto rank = [L](std::uint32_t c) {
    std::uint32_t v = 0;
    for (int i = 0; i < L; ++i) v = (v << 1) | ((c >> i) & 1u);
    return v;
  };
  std::sort(out.begin(), out.end(),
            [&rank](std::uint32_t a, std::uint32_t b) { return rank(a) > rank(b); });
  return out;
}

}  // namespace

std::string export_ltl_text(const BooleanSpec& b) {
  const int K = b.num_partitions();
  const int L = b.num_literals();

  std::string matrix_body;
  for (size_t i = 0; i < b.matrix.conjuncts.size(); ++i) {
    if (i) matrix_body += " & ";
    matrix_body += b.matrix.conjunct_text(static_cast<int>(i));
  }

  std::string legal;
  if (K == 1) {
    legal = "e0";
  } else {
    legal = "(";
    for (int k = 0; k < K; ++k) legal += (k ? " | e" : "e") + std::to_string(k);
    legal += ")";
    for (int k = 0; k < K; ++k) {
      legal += " & (e" + std::to_string(k) + " -> (";
      bool first = true;
      for (int j = 0; j < K; ++j) {
        if (j == k) continue;
        legal += (first ? "!e" : " & !e") + std::to_string(j);
        first = false;
      }
      legal += "))";
    }
    legal = "(" + legal + ")";
  }

  std::string extra;
  for (int k = 0; k < K; ++k) {
    if (k) extra += " & ";
    extra += "(e" + std::to_string(k) + " -> (";
    const auto cubes = presentation_order(b.extra(k), L);
    for (size_t i = 0; i < cubes.size(); ++i) {
      if (i) extra += " | ";
      extra += "(" + cube_text(Cube{cubes[i]}, L) + ")";
    }
    extra += "))";
  }

  return "G(" + matrix_body + ") & G(" + legal + " -> (" + extra + "))";
}

std::string booleanize_report(const BooleanSpec& b) {
  nlohmann::ordered_json doc;
  doc["sort"] = to_string(b.sort);
  doc["env"] = b.env_vars;
  doc["sys"] = b.sys_vars;
  doc["literals"] = nlohmann::ordered_json::array();
  for (const Literal& l : b.literals) doc["literals"].push_back(l.text());
  doc["partitions"] = nlohmann::ordered_json::array();
  for (const Partition& p : b.partitions) {
    nlohmann::ordered_json jp;
    jp["id"] = p.id;
    jp["reaction"] = p.reaction.cubes;
    nlohmann::ordered_json w;
    for (const auto& [name, value] : p.witness) w[name] = value.to_string();
    jp["witness"] = std::move(w);
    doc["partitions"].push_back(std::move(jp));
  }
  doc["ltl"] = export_ltl_text(b);
  return doc.dump(2) + "\n";
}

}  // namespace synthmt

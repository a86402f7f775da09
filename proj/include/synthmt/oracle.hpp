#pragma once

#include <span>
#include <string>
#include <vector>

#include "synthmt/booleanize.hpp"
#include "synthmt/spec_ast.hpp"

namespace synthmt {

/// Bounded enumeration window: Int uses the integers in [-B, B]; Real the
/// half-integers k/2 with k in [-2B, 2B].
struct Window {
  std::int64_t bound = 5;
};

/// The env-side grid for one variable.
std::vector<Value> window_points(Window w, Sort sort);

/// Exact feasibility of a cube at a concrete env input. With one system
/// variable this is interval arithmetic over the residual constraints (no
/// grid, so one-sided unbounded regions and dense witnesses are exact);
/// with several system variables it falls back to enumeration over a widened
/// grid (documented under-approximation).
bool oracle_cube_feasible(const Cube& c, const Valuation& env, std::span<const Literal> lits,
                          const std::vector<std::string>& sys_vars, Sort sort, Window w);

ReactionSet oracle_reaction(const Valuation& env, std::span<const Literal> lits,
                            const std::vector<std::string>& sys_vars, Sort sort, Window w);

using ReactionMap = std::vector<std::pair<Valuation, ReactionSet>>;

/// Reaction of every env grid point, in grid order. Throws WindowTooSmall
/// when a region boundary touches the window edge (reaction differs between
/// +-B and +-(B-1) along any env dimension).
ReactionMap oracle_reaction_map(std::span<const Literal> lits,
                                const std::vector<std::string>& env_vars,
                                const std::vector<std::string>& sys_vars, Sort sort, Window w);

enum class OracleVerdict { Realizable, Unrealizable };

/// Solves the theory-level safety game restricted to the window: states are
/// previous literal truth vectors, env moves are window grid values, system
/// responses are the exactly-computed achievable cubes.
OracleVerdict oracle_realizability(const SpecAst& ast, Window w);

}  // namespace synthmt

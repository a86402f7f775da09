#pragma once

#include <span>
#include <string>
#include <vector>

#include "synthmt/smt_session.hpp"
#include "synthmt/spec_ast.hpp"
#include "synthmt/theory.hpp"

namespace synthmt {

/// Set of achievable cube indices, kept sorted. Comparison is lexicographic
/// on the ascending index sequence, which fixes the canonical partition
/// order.
struct ReactionSet {
  std::vector<std::uint32_t> cubes;

  void insert(std::uint32_t c);
  bool contains(std::uint32_t c) const;
  size_t size() const { return cubes.size(); }
  bool empty() const { return cubes.empty(); }

  friend bool operator==(const ReactionSet& a, const ReactionSet& b) { return a.cubes == b.cubes; }
  friend bool operator<(const ReactionSet& a, const ReactionSet& b) { return a.cubes < b.cubes; }
};

/// One environment decision e_k: the inputs whose reaction set is `reaction`,
/// with a concrete witness input from the region.
struct Partition {
  int id = -1;
  ReactionSet reaction;
  Valuation witness;
};

/// The Booleanized specification: safety matrix plus the partition/reaction
/// table. The legal-input constraint is implicit in using the partition index
/// as the environment move alphabet.
struct BooleanSpec {
  Sort sort = Sort::Int;
  std::vector<std::string> env_vars;
  std::vector<std::string> sys_vars;
  std::vector<Literal> literals;
  SafetyMatrix matrix;
  std::vector<Partition> partitions;

  int num_literals() const { return static_cast<int>(literals.size()); }
  int num_partitions() const { return static_cast<int>(partitions.size()); }
  const ReactionSet& extra(int k) const { return partitions.at(k).reaction; }
};

/// { c : exists sys values satisfying cube c at input v }. Performs one
/// existential query per cube, short-circuiting cubes whose env-ground
/// literal already fails.
ReactionSet compute_reaction(const Valuation& v, std::span<const Literal> lits,
                             const std::vector<std::string>& sys_vars, Session& session);

/// psi_k(env vars): conjunction over all cubes of exists-sys satisfiability
/// (positive for reaction members, negated universally otherwise).
Formula characteristic_condition(const ReactionSet& reaction, std::span<const Literal> lits,
                                 const std::vector<std::string>& sys_vars);

/// Model-guided discovery: repeatedly asks for an input outside all known
/// regions until unsat (cover check), then verifies pairwise disjointness.
/// Result is sorted by reaction set and ids are positional.
std::vector<Partition> discover_partitions(std::span<const Literal> lits,
                                           const std::vector<std::string>& env_vars,
                                           const std::vector<std::string>& sys_vars,
                                           Session& session);

BooleanSpec emit_boolean_spec(Sort sort, std::vector<std::string> env_vars,
                              std::vector<std::string> sys_vars, std::vector<Literal> literals,
                              SafetyMatrix matrix, std::vector<Partition> partitions);

/// Full pipeline front half: parse results -> literals/matrix/partitions.
BooleanSpec booleanize(const SpecAst& ast, Session& session);

/// phi'' & G(legal -> extra) over atoms e0..e{K-1}, s0..s{L-1}, with
/// legal = exactly-one(e_k), in infix LTL syntax for external tools.
std::string export_ltl_text(const BooleanSpec& b);

/// JSON document for the booleanize CLI subcommand (literal texts, partition
/// table, exported LTL).
std::string booleanize_report(const BooleanSpec& b);

}  // namespace synthmt

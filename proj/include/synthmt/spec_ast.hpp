#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "synthmt/theory.hpp"

namespace synthmt {

/// Formula tree of a specification file. Atoms are canonical literals.
struct SpecNode {
  enum class Kind { Atom, Not, And, Or, Implies, Iff, Globally, Next };

  Kind kind = Kind::Atom;
  std::optional<Literal> atom;
  std::vector<SpecNode> kids;

  friend bool operator==(const SpecNode& a, const SpecNode& b) {
    return a.kind == b.kind && a.atom == b.atom && a.kids == b.kids;
  }
};

struct SpecAst {
  Sort sort = Sort::Int;
  std::vector<std::string> env_vars;
  std::vector<std::string> sys_vars;
  SpecNode formula;

  friend bool operator==(const SpecAst& a, const SpecAst& b) {
    return a.sort == b.sort && a.env_vars == b.env_vars && a.sys_vars == b.sys_vars &&
           a.formula == b.formula;
  }
};

/// Parses a specification file:
///   theory Int|Real
///   env x [, x2 ...]        (one declaration per line; repeatable)
///   sys y [, y2 ...]
///   spec FORMULA            (runs to end of input)
/// Formula operators: G, X, &, |, !, ->, <->; atoms are linear comparisons.
/// U, F, R are reserved and rejected. Errors carry file:line:col.
SpecAst parse_spec(std::string_view text, const std::string& filename = "<spec>");

/// Renders an AST back to parseable text; parse(render(ast)) == ast.
std::string render(const SpecAst& ast);

/// Deduplicated canonical literals in first-occurrence order; index i is the
/// identity of Boolean atom s_i.
std::vector<Literal> extract_literals(const SpecAst& ast);

/// One conjunct of the invariant matrix: a Boolean tree over current-step
/// atoms (literal indices) and next-step atoms.
struct MatrixNode {
  enum class Kind { Atom, Not, And, Or, Implies, Iff };

  Kind kind = Kind::Atom;
  int lit_index = -1;  // Atom
  bool next = false;   // Atom: true when wrapped in X
  std::vector<MatrixNode> kids;

  bool eval(std::uint32_t cur_bits, std::uint32_t next_bits) const;
};

/// The Boolean safety matrix psi: the conjunction of all G(...) bodies with
/// atoms replaced by literal indices. G(psi) constrains every consecutive
/// step pair (current atoms from step t, next atoms from step t+1).
struct SafetyMatrix {
  std::vector<MatrixNode> conjuncts;
  int num_literals = 0;

  bool eval(std::uint32_t cur_bits, std::uint32_t next_bits) const;
  /// Index of the first failing conjunct, or -1 when all hold.
  int first_violation(std::uint32_t cur_bits, std::uint32_t next_bits) const;
  /// Rendering of one conjunct over atom names s0..s{L-1}, X(s_i) for next.
  std::string conjunct_text(int i) const;
};

/// Rejects anything outside "conjunction of G(...) blocks over Boolean
/// combinations of atoms and X(atom)" with UnsupportedFragment; otherwise
/// returns the matrix over extract_literals(ast) indices.
SafetyMatrix normalize_safety(const SpecAst& ast);

/// Parses a single atom in the spec grammar (used when loading controller
/// artifacts, whose literals are stored as canonical text).
Literal parse_literal_text(const std::string& text, const std::vector<std::string>& variables,
                           Sort sort);

}  // namespace synthmt

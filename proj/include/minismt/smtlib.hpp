#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minismt {

struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> kids;

  std::string to_string() const;
};

/// Reads one balanced s-expression; returns false on end of input.
/// Skips ';' comments. Supports |quoted| symbols and "string" literals.
bool read_sexpr(std::istream& in, SExpr& out);

/// SMT-LIB v2 read-eval loop over the supported command subset:
/// set-logic, set-option, set-info, declare-const, declare-fun (0-ary),
/// assert, push, pop, check-sat, get-value, echo, reset, exit.
/// Returns the process exit code.
int run_smtlib(std::istream& in, std::ostream& out);

}  // namespace minismt

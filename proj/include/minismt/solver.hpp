#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minismt/formula.hpp"

namespace minismt {

enum class CheckResult { Sat, Unsat, Unknown };

/// Assertion stack, declarations, and QE-based decision procedure for
/// quantified linear Int/Real arithmetic.
class Context {
 public:
  /// Throws std::invalid_argument on redeclaration.
  void declare(const std::string& name, VarSort sort);
  bool is_declared(const std::string& name) const;
  std::optional<VarSort> sort_of(const std::string& name) const;

  void assert_node(NodePtr n);
  void push(unsigned n = 1);
  void pop(unsigned n = 1);
  void reset();

  CheckResult check_sat();

  /// Model of the last sat check; empty optional when the last check was not
  /// sat (or the stack changed since).
  const std::optional<std::map<std::string, Rat>>& model() const { return model_; }

 private:
  struct Level {
    std::vector<std::pair<std::string, VarSort>> decls;
    std::vector<NodePtr> asserts;
  };

  std::vector<Level> levels_{Level{}};
  std::optional<std::map<std::string, Rat>> model_;
};

/// Value of a univariate (in `var`) quantifier-free satisfiable formula.
/// Exposed for tests; throws std::logic_error when no candidate satisfies.
Rat pick_value(const std::string& var, VarSort sort, const NodePtr& univariate);

}  // namespace minismt

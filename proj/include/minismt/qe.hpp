#pragma once

#include "minismt/formula.hpp"

namespace minismt {

/// QE for one existential integer variable (Cooper's method). `f` must be
/// quantifier-free; the result is quantifier-free and free of `var`.
NodePtr eliminate_int(const std::string& var, const NodePtr& f);

/// QE for one existential real variable (virtual substitution with
/// infinitesimals). Same contract as eliminate_int.
NodePtr eliminate_real(const std::string& var, const NodePtr& f);

NodePtr eliminate_exists(const std::string& var, VarSort sort, const NodePtr& f);

/// Removes every quantifier block bottom-up, leaving a quantifier-free
/// formula over the free variables.
NodePtr eliminate_all_quantifiers(const NodePtr& f);

}  // namespace minismt

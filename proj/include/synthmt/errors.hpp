#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace synthmt {

/// Precondition of an operation violated by the caller (missing variable,
/// width mismatch, wrong sort, ...).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Spec text rejected; message is already in "file:line:col: ..." form.
struct ParseError : std::runtime_error {
  ParseError(std::string file, int line, int col, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        file(std::move(file)),
        line(line),
        col(col) {}
  std::string file;
  int line;
  int col;
};

/// Formula is syntactically fine but outside the supported safety fragment.
struct UnsupportedFragment : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverSpawnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverTimeout : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver answered `unknown`; the enclosing pipeline stage must abort.
struct SolverUnknown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Partition discovery aborted (solver gave up on a quantified query).
struct AbstractionAborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A runtime input matched no stored partition.
struct AbstractionIncomplete : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A controller-issued cube had no model; the artifact is corrupt.
struct ProviderUnsat : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by extract_controller when the initial state is losing. Carries the
/// environment partition sequence that traps the system.
struct NotRealizable : std::runtime_error {
  NotRealizable(std::string msg, std::vector<int> trap)
      : std::runtime_error(std::move(msg)), trap_partitions(std::move(trap)) {}
  std::vector<int> trap_partitions;
};

/// An internal consistency check failed (model does not satisfy its query,
/// output violates its cube, ...).
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Oracle window has a partition boundary on its edge; results would lie.
struct WindowTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace synthmt

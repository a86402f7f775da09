#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthmt/theory.hpp"

namespace synthmt {

struct SolverConfig {
  std::vector<std::string> command;  // argv of the solver process
  int timeout_ms = 10000;            // per-query
  Sort sort = Sort::Int;

  std::string logic() const { return sort == Sort::Int ? "LIA" : "LRA"; }
};

/// Resolves the solver command line: `explicit_cmd` if nonempty, else the
/// SYNTHMT_SOLVER environment variable, else a synthmt-smt binary next to the
/// current executable or on PATH, else "z3 -in".
std::vector<std::string> resolve_solver_command(const std::string& explicit_cmd);

enum class SatStatus { Sat, Unsat, Unknown };

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  Valuation model;  // populated on Sat for the requested variables

  bool is_sat() const { return status == SatStatus::Sat; }
};

/// One child SMT solver process speaking SMT-LIB v2 over stdin/stdout.
/// Exclusive-use: owned by one execution context at a time. Every public
/// operation leaves the assertion-stack depth where it found it unless it is
/// push/pop itself.
class Session {
 public:
  static Session start(const SolverConfig& config);

  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session();

  const SolverConfig& config() const { return config_; }
  int depth() const { return depth_; }

  void push();
  void pop();
  void declare(const std::string& name);
  void declare(std::span<const std::string> names);
  void assert_formula(const Formula& f);
  SatStatus check();
  /// Values of previously declared constants after a Sat check.
  Valuation get_values(std::span<const std::string> names);

  /// push; declare vars; assert f (quantifier-free over vars); check;
  /// get values; pop. On Sat the model is re-evaluated against f and an
  /// InvariantViolation is thrown on mismatch.
  SatResult solve_exists(std::span<const std::string> vars, const Formula& f);

  /// Same shape for formulas with inner exists/forall blocks; returns values
  /// of the outer (free) variables only.
  SatResult check_quantified(std::span<const std::string> outer_vars, const Formula& f);

 private:
  Session() = default;

  void send(const std::string& text);
  std::string read_reply_line();
  std::string read_reply_sexpr();
  void ensure_alive() const;
  void terminate() noexcept;
  [[noreturn]] void fail_timeout();

  SolverConfig config_;
  int pid_ = -1;
  int in_fd_ = -1;   // solver stdin (we write)
  int out_fd_ = -1;  // solver stdout (we read)
  std::string buffer_;
  int depth_ = 0;
  bool dead_ = true;
};

/// Serializes a theory formula to an SMT-LIB term (bound sorts taken from
/// `sort`). Exposed for tests.
std::string to_smt2(const Formula& f, Sort sort);

}  // namespace synthmt

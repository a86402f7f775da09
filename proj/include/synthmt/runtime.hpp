#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthmt/game.hpp"
#include "synthmt/smt_session.hpp"

namespace synthmt {

/// Per-system-variable output selection rule.
struct PolicyRule {
  enum class Kind { Any, Min, Max, TargetValue, TargetPrev };
  Kind kind = Kind::Any;
  Value target;  // TargetValue
};

struct Policy {
  std::map<std::string, PolicyRule> rules;  // unlisted variables default to Any

  /// Grammar: comma-separated `min:VAR`, `max:VAR`, `target:VAR=prev`,
  /// `target:VAR=VALUE`, `any:VAR`. min/max are Int-only; targets must be
  /// sort-compatible.
  static Policy parse(const std::string& text, Sort sort,
                      const std::vector<std::string>& sys_vars);

  const PolicyRule& rule(const std::string& var) const;
};

struct RuntimeOptions {
  std::int64_t optimization_cap = std::int64_t{1} << 20;  // max distance from the first model
  bool verify_extrema = false;  // post-hoc unsat check per optimized variable
};

/// One executed step of the T-controller.
struct TraceStep {
  int step = 0;
  Valuation input;
  int partition = -1;
  std::uint32_t cube = 0;
  Valuation output;
  bool capped = false;                    // an optimization hit the cap
  std::optional<std::string> violation;   // violated matrix conjunct, if any

  bool ok() const { return !violation.has_value(); }
};

/// JSON-lines rendering: {"step":..,"in":{..},"partition":..,"cube":..,
/// "out":{..},"verdict":"ok"}. Values are exact decimal/fraction strings.
std::string trace_step_json(const TraceStep& ts);

/// One `x=4 y=2`-style line into a valuation over the given variables.
Valuation parse_assignment_line(const std::string& line, const std::vector<std::string>& vars,
                                Sort sort);

/// Reaction-set lookup of the input: grounded existential queries, then the
/// unique partition with that reaction. AbstractionIncomplete when none
/// matches.
int classify_input(const Valuation& v, const BooleanSpec& spec, Session& session);

struct ProvideResult {
  Valuation output;
  bool capped = false;
};

/// Model of the grounded cube under the policy. min/max run exponential
/// probing plus binary search over check-sat queries, capped at
/// optimization_cap from the first model (OptimizationCapped -> capped flag).
ProvideResult provide_output(const Cube& c, const Valuation& v, const Policy& policy,
                             const std::optional<Valuation>& prev, const BooleanSpec& spec,
                             Session& session, const RuntimeOptions& opts = {});

/// ok (nullopt) iff the matrix holds reading plain atoms from prev and
/// next-atoms from cur. The first step (no prev) defers its current-only
/// conjuncts to the following check, matching the game's init semantics.
std::optional<std::string> monitor_step(std::optional<std::uint32_t> prev_bits,
                                        std::uint32_t cur_bits, const SafetyMatrix& matrix);

/// The dynamic T-controller: Boolean Mealy strategy + partitioner + provider
/// + monitor, owning one Mealy state and the previous output.
class Engine {
 public:
  Engine(MealyController controller, Session& session, Policy policy, RuntimeOptions opts = {});

  TraceStep step(const Valuation& input);
  std::vector<TraceStep> run_trace(std::span<const Valuation> inputs);
  /// Uniform inputs in [-window, window] (Int) or half-integers over the same
  /// range (Real); reproducible for a fixed seed.
  std::vector<TraceStep> run_random(int steps, std::uint64_t seed, std::int64_t window);

  const MealyController& controller() const { return controller_; }
  int mealy_state() const { return state_; }

 private:
  MealyController controller_;
  Session& session_;
  Policy policy_;
  RuntimeOptions opts_;
  int state_;
  std::optional<Valuation> prev_output_;
  std::optional<std::uint32_t> prev_bits_;
  int steps_done_ = 0;
};

}  // namespace synthmt

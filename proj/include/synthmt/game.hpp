#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "synthmt/booleanize.hpp"

namespace synthmt {

/// Explicit two-player safety game. State 0 is init; state 1 + k*2^L + c
/// remembers the previous step's (partition, cube). Edge safety between
/// cube assignments is the safety matrix evaluated on the pair.
struct SafetyGame {
  int K = 0;
  int L = 0;
  SafetyMatrix matrix;
  std::vector<ReactionSet> extra;  // menu per env move, before edge filtering

  int num_states() const { return K * (1 << L) + 1; }
  int state_id(int k, std::uint32_t cube) const { return 1 + k * (1 << L) + static_cast<int>(cube); }
  std::uint32_t state_cube(int s) const { return static_cast<std::uint32_t>((s - 1) % (1 << L)); }
  int state_partition(int s) const { return (s - 1) / (1 << L); }

  /// Whether the move to cube `to` is allowed from state s under env move k:
  /// membership in extra[k] plus matrix safety (init unconstrained).
  bool edge_safe(int s, int k, std::uint32_t to) const {
    if (!extra[k].contains(to)) return false;
    return s == 0 || matrix.eval(state_cube(s), to);
  }
};

/// Throws StateSpaceTooLarge when K*2^L exceeds max_states.
SafetyGame build_game(const BooleanSpec& b, std::size_t max_states = std::size_t{1} << 20);

struct WinningSet {
  std::vector<char> win;        // indexed by state id
  std::vector<int> death_iter;  // fixpoint round that removed the state (0 = alive)
  std::vector<int> kill_move;   // env move with no surviving response
  bool realizable = false;
};

/// Greatest fixpoint of the one-step force operator (simultaneous update).
WinningSet solve_safety(const SafetyGame& g);

/// Env partition sequence from init to a dead end, following maximal-rank
/// successors; used as the unrealizability witness.
std::vector<int> trap_sequence(const SafetyGame& g, const WinningSet& ws);

/// Deterministic Boolean strategy: delta total on W x [0,K), each move the
/// smallest safe cube index with a winning successor.
struct MealyController {
  BooleanSpec spec;
  int initial = 0;
  std::vector<char> winning;
  std::map<std::pair<int, int>, std::pair<std::uint32_t, int>> delta;  // (state,k) -> (cube,next)
  bool realizable = false;
};

/// Throws NotRealizable (with trap sequence) when init lost the game.
MealyController extract_controller(const SafetyGame& g, const WinningSet& ws,
                                   const BooleanSpec& b);

/// Convenience: booleanized spec -> controller.
MealyController synthesize(const BooleanSpec& b, std::size_t max_states = std::size_t{1} << 20);

/// Controller artifact (JSON text), bit-exact and stable across runs.
std::string controller_to_json(const MealyController& c);
MealyController controller_from_json(const std::string& text);
void save_controller(const MealyController& c, const std::string& path);
MealyController load_controller(const std::string& path);

}  // namespace synthmt

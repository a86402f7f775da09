#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "synthmt/booleanize.hpp"
#include "synthmt/errors.hpp"
#include "synthmt/game.hpp"
#include "synthmt/oracle.hpp"
#include "synthmt/runtime.hpp"

namespace {

using namespace synthmt;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnrealizable = 2;
constexpr int kExitUnknown = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

struct Options {
  std::string solver;
  int timeout_ms = 10000;
  std::uint64_t seed = 0;
  std::int64_t window = 5;
  std::string policy;
  std::string output;
};

Session open_session(const Options& opt, Sort sort) {
  SolverConfig cfg;
  cfg.command = resolve_solver_command(opt.solver);
  cfg.timeout_ms = opt.timeout_ms;
  cfg.sort = sort;
  return Session::start(cfg);
}

BooleanSpec booleanize_file(const std::string& path, const Options& opt, Session** out_session,
                            std::optional<Session>& session_slot) {
  SpecAst ast = parse_spec(read_file(path), path);
  session_slot.emplace(open_session(opt, ast.sort));
  *out_session = &*session_slot;
  return booleanize(ast, *session_slot);
}

int cmd_check(const std::string& path, const Options& opt) {
  std::optional<Session> session;
  Session* sp = nullptr;
  BooleanSpec b = booleanize_file(path, opt, &sp, session);
  SafetyGame g = build_game(b);
  WinningSet ws = solve_safety(g);
  if (ws.realizable) {
    std::cout << "REALIZABLE" << std::endl;
    return kExitOk;
  }
  std::cout << "UNREALIZABLE" << std::endl;
  std::vector<int> trap = trap_sequence(g, ws);
  std::cerr << "trap input sequence (partition ids):";
  for (int k : trap) std::cerr << " e" << k;
  std::cerr << std::endl;
  return kExitUnrealizable;
}

int cmd_booleanize(const std::string& path, const Options& opt) {
  std::optional<Session> session;
  Session* sp = nullptr;
  BooleanSpec b = booleanize_file(path, opt, &sp, session);
  write_output(opt.output, booleanize_report(b));
  return kExitOk;
}

int cmd_synth(const std::string& path, const Options& opt) {
  std::optional<Session> session;
  Session* sp = nullptr;
  BooleanSpec b = booleanize_file(path, opt, &sp, session);
  MealyController ctrl;
  try {
    ctrl = synthesize(b);
  } catch (const NotRealizable& e) {
    std::cerr << e.what() << std::endl;
    return kExitUnrealizable;
  }
  if (opt.output.empty()) throw std::runtime_error("synth requires -o ARTIFACT");
  save_controller(ctrl, opt.output);
  std::cerr << "controller written to " << opt.output << std::endl;
  return kExitOk;
}

int cmd_simulate(const std::string& artifact_path, const std::string& inputs_path, int random_n,
                 const Options& opt) {
  MealyController ctrl = load_controller(artifact_path);
  if (!ctrl.realizable) {
    std::cerr << "artifact is not realizable; nothing to simulate" << std::endl;
    return kExitUsage;
  }
  Session session = open_session(opt, ctrl.spec.sort);
  Policy policy = Policy::parse(opt.policy, ctrl.spec.sort, ctrl.spec.sys_vars);
  Engine engine(std::move(ctrl), session, std::move(policy));

  const auto& env_vars = engine.controller().spec.env_vars;
  const Sort sort = engine.controller().spec.sort;

  if (random_n > 0) {
    for (const TraceStep& ts : engine.run_random(random_n, opt.seed, opt.window))
      std::cout << trace_step_json(ts) << "\n";
    return kExitOk;
  }
  if (!inputs_path.empty()) {
    std::ifstream in(inputs_path);
    if (!in) throw std::runtime_error("cannot read input script '" + inputs_path + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::cout << trace_step_json(engine.step(parse_assignment_line(line, env_vars, sort)))
                << "\n";
    }
    return kExitOk;
  }
  // Interactive: one assignment per stdin line, echo one trace line per step.
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "quit") break;
    std::cout << trace_step_json(engine.step(parse_assignment_line(line, env_vars, sort)))
              << std::endl;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& path, const Options& opt) {
  SpecAst ast = parse_spec(read_file(path), path);
  Window w{opt.window};
  std::vector<Literal> lits = extract_literals(ast);
  ReactionMap map = oracle_reaction_map(lits, ast.env_vars, ast.sys_vars, ast.sort, w);

  // Group consecutive grid points with equal reactions.
  std::cout << "literals:" << std::endl;
  for (size_t i = 0; i < lits.size(); ++i)
    std::cout << "  s" << i << ": " << lits[i].text() << std::endl;
  std::cout << "regions (window " << w.bound << "):" << std::endl;
  size_t start = 0;
  auto flush_region = [&](size_t from, size_t to) {
    std::cout << "  [";
    bool first = true;
    for (const auto& [name, value] : map[from].first) {
      if (!first) std::cout << ",";
      first = false;
      std::cout << name << "=" << value.to_string();
    }
    std::cout << " .. ";
    first = true;
    for (const auto& [name, value] : map[to].first) {
      if (!first) std::cout << ",";
      first = false;
      std::cout << name << "=" << value.to_string();
    }
    std::cout << "] reaction {";
    first = true;
    for (std::uint32_t c : map[from].second.cubes) {
      if (!first) std::cout << ", ";
      first = false;
      std::cout << cube_text(Cube{c}, static_cast<int>(lits.size()));
    }
    std::cout << "}" << std::endl;
  };
  for (size_t i = 1; i <= map.size(); ++i) {
    if (i == map.size() || !(map[i].second == map[start].second)) {
      flush_region(start, i - 1);
      start = i;
    }
  }

  OracleVerdict v = oracle_realizability(ast, w);
  std::cout << "verdict: " << (v == OracleVerdict::Realizable ? "REALIZABLE" : "UNREALIZABLE")
            << std::endl;
  return v == OracleVerdict::Realizable ? kExitOk : kExitUnrealizable;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controller synthesis for safety specifications over linear Int/Real arithmetic"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--solver", opt.solver, "SMT solver command (default: bundled synthmt-smt)");
  app.add_option("--timeout-ms", opt.timeout_ms, "per-query solver timeout")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "random input seed");
  app.add_option("--window", opt.window, "window bound for random inputs and the oracle")
      ->check(CLI::PositiveNumber);
  app.add_option("--policy", opt.policy, "output policy, e.g. min:y,max:z,target:w=prev");
  app.add_option("-o,--output", opt.output, "output file");

  std::string spec_path, artifact_path, inputs_path;
  int random_n = 0;

  CLI::App* check = app.add_subcommand("check", "decide realizability");
  check->add_option("spec", spec_path, "specification file")->required();

  CLI::App* booleanize_cmd = app.add_subcommand("booleanize", "emit the Boolean abstraction");
  booleanize_cmd->add_option("spec", spec_path, "specification file")->required();

  CLI::App* synth = app.add_subcommand("synth", "synthesize a controller artifact");
  synth->add_option("spec", spec_path, "specification file")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run a controller artifact");
  simulate->add_option("artifact", artifact_path, "controller artifact (JSON)")->required();
  simulate->add_option("--inputs", inputs_path, "input script (one assignment line per step)");
  simulate->add_option("--random", random_n, "number of random steps");

  CLI::App* oracle = app.add_subcommand("oracle", "bounded-window reference analysis");
  oracle->add_option("spec", spec_path, "specification file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(spec_path, opt);
    if (booleanize_cmd->parsed()) return cmd_booleanize(spec_path, opt);
    if (synth->parsed()) return cmd_synth(spec_path, opt);
    if (simulate->parsed()) return cmd_simulate(artifact_path, inputs_path, random_n, opt);
    if (oracle->parsed()) return cmd_oracle(spec_path, opt);
  } catch (const ParseError& e) {
    std::cerr << e.what() << std::endl;
    return kExitUsage;
  } catch (const UnsupportedFragment& e) {
    std::cerr << "unsupported fragment: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const SolverTimeout& e) {
    std::cerr << e.what() << std::endl;
    return kExitUnknown;
  } catch (const SolverUnknown& e) {
    std::cerr << e.what() << std::endl;
    return kExitUnknown;
  } catch (const AbstractionAborted& e) {
    std::cerr << e.what() << std::endl;
    return kExitUnknown;
  } catch (const WindowTooSmall& e) {
    std::cerr << e.what() << std::endl;
    return kExitUnknown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  }
  return kExitUsage;
}

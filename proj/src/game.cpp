#include "synthmt/game.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "synthmt/errors.hpp"

namespace synthmt {

SafetyGame build_game(const BooleanSpec& b, std::size_t max_states) {
  const int L = b.num_literals();
  if (L < 1 || L > 20) throw StateSpaceTooLarge("literal count outside the supported range");
  std::size_t states = static_cast<std::size_t>(b.num_partitions()) << L;
  if (states > max_states)
    throw StateSpaceTooLarge("game would need " + std::to_string(states) +
                             " states (cap " + std::to_string(max_states) + ")");
  SafetyGame g;
  g.K = b.num_partitions();
  g.L = L;
  g.matrix = b.matrix;
  for (int k = 0; k < g.K; ++k) g.extra.push_back(b.extra(k));
  return g;
}

WinningSet solve_safety(const SafetyGame& g) {
  const int n = g.num_states();
  WinningSet ws;
  ws.win.assign(n, 1);
  ws.death_iter.assign(n, 0);
  ws.kill_move.assign(n, -1);

  std::vector<char> next(n, 1);
  int iter = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++iter;
    for (int s = 0; s < n; ++s) {
      if (!ws.win[s]) {
        next[s] = 0;
        continue;
      }
      next[s] = 1;
      for (int k = 0; k < g.K; ++k) {
        bool escape = false;
        for (std::uint32_t c : g.extra[k].cubes) {
          if (g.edge_safe(s, k, c) && ws.win[g.state_id(k, c)]) {
            escape = true;
            break;
          }
        }
        if (!escape) {
          next[s] = 0;
          ws.death_iter[s] = iter;
          ws.kill_move[s] = k;
          changed = true;
          break;
        }
      }
    }
    std::swap(ws.win, next);
  }
  ws.realizable = ws.win[0] != 0;
  return ws;
}

std::vector<int> trap_sequence(const SafetyGame& g, const WinningSet& ws) {
  if (ws.realizable) return {};
  std::vector<int> seq;
  int s = 0;
  // Follow the killing env move; among the (all dead) system responses pick
  // the one that survived longest. death_iter strictly decreases, so this
  // terminates.
  while (true) {
    int k = ws.kill_move[s];
    if (k < 0) break;
    seq.push_back(k);
    int best = -1;
    int best_iter = -1;
    for (std::uint32_t c : g.extra[k].cubes) {
      if (s != 0 && !g.edge_safe(s, k, c)) continue;
      int succ = g.state_id(k, c);
      if (ws.death_iter[succ] > best_iter) {
        best_iter = ws.death_iter[succ];
        best = succ;
      }
    }
    if (best < 0) break;  // no legal response at all: trap complete
    s = best;
  }
  return seq;
}

MealyController extract_controller(const SafetyGame& g, const WinningSet& ws,
                                   const BooleanSpec& b) {
  if (!ws.realizable) {
    std::vector<int> trap = trap_sequence(g, ws);
    std::string msg = "specification is unrealizable; trapping input sequence (partitions):";
    for (int k : trap) {
      msg += " e" + std::to_string(k);
      const Valuation& w = b.partitions[k].witness;
      msg += "(";
      bool first = true;
      for (const auto& [name, value] : w) {
        if (!first) msg += ",";
        first = false;
        msg += name + "=" + value.to_string();
      }
      msg += ")";
    }
    throw NotRealizable(msg, std::move(trap));
  }

  MealyController ctrl;
  ctrl.spec = b;
  ctrl.initial = 0;
  ctrl.winning = ws.win;
  ctrl.realizable = true;
  for (int s = 0; s < g.num_states(); ++s) {
    if (!ws.win[s]) continue;
    for (int k = 0; k < g.K; ++k) {
      bool placed = false;
      for (std::uint32_t c : g.extra[k].cubes) {  // ascending: smallest index wins
        int succ = g.state_id(k, c);
        if (g.edge_safe(s, k, c) && ws.win[succ]) {
          ctrl.delta[{s, k}] = {c, succ};
          placed = true;
          break;
        }
      }
      if (!placed)
        throw InvariantViolation("winning state lacks a move: fixpoint is not stable");
    }
  }
  return ctrl;
}

MealyController synthesize(const BooleanSpec& b, std::size_t max_states) {
  SafetyGame g = build_game(b, max_states);
  WinningSet ws = solve_safety(g);
  return extract_controller(g, ws, b);
}

namespace {

using Json = nlohmann::ordered_json;

Json matrix_node_to_json(const MatrixNode& n) {
  Json j;
  switch (n.kind) {
    case MatrixNode::Kind::Atom:
      j["op"] = "atom";
      j["s"] = n.lit_index;
      j["next"] = n.next;
      return j;
    case MatrixNode::Kind::Not: j["op"] = "not"; break;
    case MatrixNode::Kind::And: j["op"] = "and"; break;
    case MatrixNode::Kind::Or: j["op"] = "or"; break;
    case MatrixNode::Kind::Implies: j["op"] = "implies"; break;
    case MatrixNode::Kind::Iff: j["op"] = "iff"; break;
  }
  j["kids"] = Json::array();
  for (const MatrixNode& k : n.kids) j["kids"].push_back(matrix_node_to_json(k));
  return j;
}

MatrixNode matrix_node_from_json(const Json& j, int num_literals) {
  MatrixNode n;
  const std::string op = j.at("op").get<std::string>();
  if (op == "atom") {
    n.kind = MatrixNode::Kind::Atom;
    n.lit_index = j.at("s").get<int>();
    n.next = j.at("next").get<bool>();
    if (n.lit_index < 0 || n.lit_index >= num_literals)
      throw std::invalid_argument("matrix atom index out of range");
    return n;
  }
  if (op == "not") n.kind = MatrixNode::Kind::Not;
  else if (op == "and") n.kind = MatrixNode::Kind::And;
  else if (op == "or") n.kind = MatrixNode::Kind::Or;
  else if (op == "implies") n.kind = MatrixNode::Kind::Implies;
  else if (op == "iff") n.kind = MatrixNode::Kind::Iff;
  else throw std::invalid_argument("unknown matrix op '" + op + "'");
  for (const Json& k : j.at("kids")) n.kids.push_back(matrix_node_from_json(k, num_literals));
  if (n.kind == MatrixNode::Kind::Not && n.kids.size() != 1)
    throw std::invalid_argument("matrix not-node arity");
  if ((n.kind == MatrixNode::Kind::Implies || n.kind == MatrixNode::Kind::Iff) &&
      n.kids.size() != 2)
    throw std::invalid_argument("matrix binary-node arity");
  return n;
}

Json valuation_to_json(const Valuation& v) {
  Json j;
  for (const auto& [name, value] : v) j[name] = value.to_string();
  return j;
}

Valuation valuation_from_json(const Json& j) {
  Valuation v;
  for (auto it = j.begin(); it != j.end(); ++it)
    v[it.key()] = Rational::parse(it.value().get<std::string>());
  return v;
}

}  // namespace

std::string controller_to_json(const MealyController& c) {
  const BooleanSpec& b = c.spec;
  Json doc;
  doc["version"] = 1;
  doc["sort"] = to_string(b.sort);
  doc["env"] = b.env_vars;
  doc["sys"] = b.sys_vars;
  doc["literals"] = Json::array();
  for (const Literal& l : b.literals) doc["literals"].push_back(l.text());
  doc["matrix"] = Json::array();
  for (const MatrixNode& n : b.matrix.conjuncts) doc["matrix"].push_back(matrix_node_to_json(n));
  doc["partitions"] = Json::array();
  for (const Partition& p : b.partitions) {
    Json jp;
    jp["id"] = p.id;
    jp["reaction"] = p.reaction.cubes;
    jp["witness"] = valuation_to_json(p.witness);
    doc["partitions"].push_back(std::move(jp));
  }
  doc["initial"] = c.initial;
  doc["realizable"] = c.realizable;
  doc["transitions"] = Json::array();
  for (const auto& [key, value] : c.delta) {
    Json jt;
    jt["state"] = key.first;
    jt["input"] = key.second;
    jt["cube"] = value.first;
    jt["next"] = value.second;
    doc["transitions"].push_back(std::move(jt));
  }
  return doc.dump(2) + "\n";
}

MealyController controller_from_json(const std::string& text) {
  Json doc = Json::parse(text);
  if (doc.at("version").get<int>() != 1)
    throw std::invalid_argument("unsupported controller artifact version");

  BooleanSpec b;
  const std::string sort_text = doc.at("sort").get<std::string>();
  if (sort_text == "Int") b.sort = Sort::Int;
  else if (sort_text == "Real") b.sort = Sort::Real;
  else throw std::invalid_argument("unknown sort in artifact");
  b.env_vars = doc.at("env").get<std::vector<std::string>>();
  b.sys_vars = doc.at("sys").get<std::vector<std::string>>();

  std::vector<std::string> all_vars = b.env_vars;
  all_vars.insert(all_vars.end(), b.sys_vars.begin(), b.sys_vars.end());
  for (const Json& jl : doc.at("literals")) {
    const std::string lt = jl.get<std::string>();
    Literal l = parse_literal_text(lt, all_vars, b.sort);
    if (l.text() != lt)
      throw std::invalid_argument("literal text is not canonical: '" + lt + "'");
    b.literals.push_back(std::move(l));
  }
  if (b.literals.empty()) throw std::invalid_argument("artifact without literals");

  b.matrix.num_literals = static_cast<int>(b.literals.size());
  for (const Json& jn : doc.at("matrix"))
    b.matrix.conjuncts.push_back(matrix_node_from_json(jn, b.matrix.num_literals));

  const std::uint32_t cube_count = 1u << b.literals.size();
  for (const Json& jp : doc.at("partitions")) {
    Partition p;
    p.id = jp.at("id").get<int>();
    for (std::uint32_t c : jp.at("reaction").get<std::vector<std::uint32_t>>()) {
      if (c >= cube_count) throw std::invalid_argument("reaction cube index out of range");
      p.reaction.insert(c);
    }
    p.witness = valuation_from_json(jp.at("witness"));
    b.partitions.push_back(std::move(p));
  }
  for (size_t i = 0; i < b.partitions.size(); ++i)
    if (b.partitions[i].id != static_cast<int>(i))
      throw std::invalid_argument("partition ids must be positional");

  MealyController ctrl;
  ctrl.initial = doc.at("initial").get<int>();
  ctrl.realizable = doc.at("realizable").get<bool>();

  SafetyGame g = build_game(b);
  ctrl.winning.assign(g.num_states(), 0);
  for (const Json& jt : doc.at("transitions")) {
    int state = jt.at("state").get<int>();
    int input = jt.at("input").get<int>();
    std::uint32_t cube = jt.at("cube").get<std::uint32_t>();
    int next = jt.at("next").get<int>();
    if (state < 0 || state >= g.num_states() || input < 0 || input >= g.K)
      throw std::invalid_argument("transition outside the game");
    if (!b.extra(input).contains(cube))
      throw std::invalid_argument("transition cube not in the input's reaction set");
    if (next != g.state_id(input, cube))
      throw std::invalid_argument("transition successor inconsistent with (input, cube)");
    ctrl.winning[state] = 1;
    ctrl.delta[{state, input}] = {cube, next};
  }
  if (ctrl.realizable) {
    if (ctrl.initial != 0 || !ctrl.winning[0])
      throw std::invalid_argument("realizable artifact must cover the initial state");
    for (int s = 0; s < g.num_states(); ++s) {
      if (!ctrl.winning[s]) continue;
      for (int k = 0; k < g.K; ++k) {
        auto it = ctrl.delta.find({s, k});
        if (it == ctrl.delta.end())
          throw std::invalid_argument("controller is not total on its winning states");
        if (!ctrl.winning[it->second.second])
          throw std::invalid_argument("controller leaves its winning set");
      }
    }
  }
  ctrl.spec = std::move(b);
  return ctrl;
}

void save_controller(const MealyController& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write controller artifact to '" + path + "'");
  out << controller_to_json(c);
  if (!out.good()) throw std::runtime_error("failed while writing '" + path + "'");
}

MealyController load_controller(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read controller artifact '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return controller_from_json(text);
}

}  // namespace synthmt

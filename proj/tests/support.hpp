#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "synthmt/smt_session.hpp"
#include "synthmt/spec_ast.hpp"

#ifndef SYNTHMT_SOLVER_BIN
#define SYNTHMT_SOLVER_BIN "synthmt-smt"
#endif
#ifndef SYNTHMT_SPECS_DIR
#define SYNTHMT_SPECS_DIR "specs"
#endif

namespace testsupport {

inline synthmt::SolverConfig solver_config(synthmt::Sort sort, int timeout_ms = 10000) {
  synthmt::SolverConfig cfg;
  cfg.command = {SYNTHMT_SOLVER_BIN};
  cfg.sort = sort;
  cfg.timeout_ms = timeout_ms;
  return cfg;
}

inline synthmt::Session session(synthmt::Sort sort) {
  return synthmt::Session::start(solver_config(sort));
}

inline std::string spec_path(const std::string& name) {
  return std::string(SYNTHMT_SPECS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline synthmt::SpecAst load_spec(const std::string& name) {
  return synthmt::parse_spec(read_file(spec_path(name)), name);
}

inline synthmt::Literal lit(std::initializer_list<std::pair<std::string, std::int64_t>> terms,
                            synthmt::RelOp op, synthmt::Rational rhs) {
  std::map<std::string, synthmt::Rational> m;
  for (const auto& [name, c] : terms) m[name] = synthmt::Rational(c);
  return synthmt::Literal::make(m, op, rhs);
}

inline synthmt::Valuation val(std::initializer_list<std::pair<std::string, synthmt::Rational>> vs) {
  synthmt::Valuation v;
  for (const auto& [name, value] : vs) v[name] = value;
  return v;
}

}  // namespace testsupport

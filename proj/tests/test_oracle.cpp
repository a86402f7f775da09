#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "synthmt/errors.hpp"
#include "synthmt/oracle.hpp"

using namespace synthmt;
using testsupport::val;

namespace {

ReactionSet rset(std::initializer_list<std::uint32_t> cubes) {
  ReactionSet r;
  for (std::uint32_t c : cubes) r.insert(c);
  return r;
}

struct Loaded {
  SpecAst ast;
  std::vector<Literal> lits;

  explicit Loaded(const std::string& name)
      : ast(testsupport::load_spec(name)), lits(extract_literals(ast)) {}

  ReactionSet at(Rational x, Window w = Window{8}) const {
    return oracle_reaction(val({{"x", x}}), lits, ast.sys_vars, ast.sort, w);
  }
};

}  // namespace

TEST_CASE("window grids") {
  CHECK(window_points(Window{2}, Sort::Int) ==
        std::vector<Value>{Rational(-2), Rational(-1), Rational(0), Rational(1), Rational(2)});
  std::vector<Value> reals = window_points(Window{1}, Sort::Real);
  CHECK(reals == std::vector<Value>{Rational(-1), Rational(-1, 2), Rational(0), Rational(1, 2),
                                    Rational(1)});
  CHECK_THROWS_AS(window_points(Window{0}, Sort::Int), ContractViolation);
}

TEST_CASE("running example regions over Int, window 8") {
  Loaded s("running_int.spec");
  ReactionMap map = oracle_reaction_map(s.lits, s.ast.env_vars, s.ast.sys_vars, s.ast.sort,
                                        Window{8});
  CHECK(map.size() == 17);
  for (const auto& [point, reaction] : map) {
    const Rational& x = point.at("x");
    if (x < Rational(2)) CHECK(reaction == rset({1, 3, 5}));
    else if (x == Rational(2)) CHECK(reaction == rset({2, 4}));
    else CHECK(reaction == rset({2, 4, 6}));
  }
}

TEST_CASE("modified example refines the low region, window 8") {
  Loaded s("running_mod_int.spec");
  for (int x = -8; x <= 0; ++x) CHECK(s.at(Rational(x)) == rset({1, 3, 5}));
  CHECK(s.at(Rational(1)) == rset({3, 5}));
  for (int x = 2; x <= 8; ++x) CHECK(s.at(Rational(x)) == rset({2, 4, 6}));
}

TEST_CASE("real-sorted regions split at 1 and 2 on the half grid") {
  Loaded s("running_real.spec");
  ReactionMap map = oracle_reaction_map(s.lits, s.ast.env_vars, s.ast.sys_vars, s.ast.sort,
                                        Window{8});
  CHECK(map.size() == 33);
  for (const auto& [point, reaction] : map) {
    const Rational& x = point.at("x");
    if (x <= Rational(1)) CHECK(reaction == rset({1, 3, 5}));
    else if (x < Rational(2)) CHECK(reaction == rset({3, 5, 7}));
    else CHECK(reaction == rset({2, 4, 6}));
  }
  // The dense witness at x = 3/2: y must lie strictly between 1 and 3/2,
  // which no half-integer grid point would find.
  CHECK(oracle_cube_feasible(Cube{7}, val({{"x", Rational(3, 2)}}), s.lits, s.ast.sys_vars,
                             Sort::Real, Window{8}));
  CHECK(!oracle_cube_feasible(Cube{7}, val({{"x", Rational(1)}}), s.lits, s.ast.sys_vars,
                              Sort::Real, Window{8}));
}

TEST_CASE("a boundary on the window edge is reported") {
  SpecAst ast = parse_spec("theory Int\nenv x\nsys y\nspec G((x<8) -> (y>0))\n", "edge.spec");
  std::vector<Literal> lits = extract_literals(ast);
  CHECK_THROWS_AS(oracle_reaction_map(lits, ast.env_vars, ast.sys_vars, ast.sort, Window{8}),
                  WindowTooSmall);
  CHECK_NOTHROW(oracle_reaction_map(lits, ast.env_vars, ast.sys_vars, ast.sort, Window{9}));
}

TEST_CASE("bounded realizability verdicts at window 5") {
  CHECK(oracle_realizability(testsupport::load_spec("running_int.spec"), Window{5}) ==
        OracleVerdict::Unrealizable);
  CHECK(oracle_realizability(testsupport::load_spec("running_mod_int.spec"), Window{5}) ==
        OracleVerdict::Realizable);
  CHECK(oracle_realizability(testsupport::load_spec("running_real.spec"), Window{5}) ==
        OracleVerdict::Realizable);
  CHECK(oracle_realizability(testsupport::load_spec("free_choice.spec"), Window{5}) ==
        OracleVerdict::Realizable);
  CHECK(oracle_realizability(testsupport::load_spec("stateless_int.spec"), Window{5}) ==
        OracleVerdict::Realizable);
}

TEST_CASE("interval feasibility handles pins, exclusions, and unbounded sides") {
  // Literal order: (y=2), (x<0), (y!=3), (x<1).
  SpecAst ast =
      parse_spec("theory Int\nenv x\nsys y\nspec G(((y=2) -> (x<0)) & ((y!=3) -> (x<1)))\n",
                 "pins.spec");
  std::vector<Literal> lits = extract_literals(ast);
  REQUIRE(lits.size() == 4);

  // At x=0 the env bits are forced to !(x<0), (x<1): bit1=0, bit3=1.
  Valuation x0 = val({{"x", Rational(0)}});
  // y=2 and y!=3: a pin plus a compatible exclusion.
  CHECK(oracle_cube_feasible(Cube{0b1101}, x0, lits, ast.sys_vars, Sort::Int, Window{8}));
  // y=2 and y=3: conflicting pins.
  CHECK(!oracle_cube_feasible(Cube{0b1001}, x0, lits, ast.sys_vars, Sort::Int, Window{8}));
  // y!=2 and y!=3: exclusions on an unbounded domain.
  CHECK(oracle_cube_feasible(Cube{0b1100}, x0, lits, ast.sys_vars, Sort::Int, Window{8}));
  // Wrong env polarity is ground-false regardless of y.
  CHECK(!oracle_cube_feasible(Cube{0b0101}, x0, lits, ast.sys_vars, Sort::Int, Window{8}));
}

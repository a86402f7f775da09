#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "synthmt/errors.hpp"
#include "synthmt/smt_session.hpp"

using namespace synthmt;
using testsupport::lit;
using testsupport::val;

namespace {

Formula conj(std::initializer_list<Literal> lits) {
  std::vector<Formula> fs;
  for (const Literal& l : lits) fs.push_back(Formula::lit(l));
  return Formula::conj(std::move(fs));
}

const std::vector<std::string> kY{"y"};
const std::vector<std::string> kX{"x"};

}  // namespace

TEST_CASE("a fresh session answers sat on the empty stack") {
  Session s = testsupport::session(Sort::Int);
  CHECK(s.check() == SatStatus::Sat);
  CHECK(s.depth() == 0);
}

TEST_CASE("a nonexistent binary fails to spawn") {
  SolverConfig cfg;
  cfg.command = {"/nonexistent/solver-binary"};
  cfg.sort = Sort::Int;
  CHECK_THROWS_AS(Session::start(cfg), SolverSpawnError);
}

TEST_CASE("two sessions from one config are independent processes") {
  Session a = testsupport::session(Sort::Int);
  Session b = testsupport::session(Sort::Int);
  a.push();
  a.declare("y");
  a.assert_formula(conj({lit({{"y", 1}}, RelOp::Eq, 1), lit({{"y", 1}}, RelOp::Eq, 2)}));
  CHECK(a.check() == SatStatus::Unsat);
  CHECK(b.check() == SatStatus::Sat);  // untouched by a's assertions
  a.pop();
}

TEST_CASE("solve_exists returns exact models and restores depth") {
  Session s = testsupport::session(Sort::Int);

  // not(4<2) already reduced away; y > 1 and y <= 4 has models {2,3,4}.
  SatResult r = s.solve_exists(
      kY, conj({lit({{"y", 1}}, RelOp::Gt, 1), lit({{"y", 1}}, RelOp::Le, 4)}));
  REQUIRE(r.is_sat());
  CHECK(r.model.at("y") >= Rational(2));
  CHECK(r.model.at("y") <= Rational(4));
  CHECK(s.depth() == 0);

  CHECK(s.solve_exists(kY, conj({lit({{"y", 1}}, RelOp::Gt, 1), lit({{"y", 1}}, RelOp::Lt, 2)}))
            .status == SatStatus::Unsat);
  CHECK(s.depth() == 0);
}

TEST_CASE("the same narrow band is satisfiable over the reals") {
  Session s = testsupport::session(Sort::Real);
  SatResult r =
      s.solve_exists(kY, conj({lit({{"y", 1}}, RelOp::Gt, 1), lit({{"y", 1}}, RelOp::Lt, 2)}));
  REQUIRE(r.is_sat());
  CHECK(r.model.at("y") > Rational(1));
  CHECK(r.model.at("y") < Rational(2));
}

TEST_CASE("check_quantified handles exists-forall shapes") {
  Session s = testsupport::session(Sort::Int);

  // exists x: (exists y: x<2 & y>1 & y>=x) & (forall y: !(x<2 & y>1 & y<x))
  Formula f = Formula::conj(
      {Formula::exists({"y"}, conj({lit({{"x", 1}}, RelOp::Lt, 2), lit({{"y", 1}}, RelOp::Gt, 1),
                                    lit({{"y", 1}, {"x", -1}}, RelOp::Ge, 0)})),
       Formula::forall({"y"}, Formula::negate(conj({lit({{"x", 1}}, RelOp::Lt, 2),
                                                    lit({{"y", 1}}, RelOp::Gt, 1),
                                                    lit({{"y", 1}, {"x", -1}}, RelOp::Lt, 0)})))});
  SatResult r = s.check_quantified(kX, f);
  REQUIRE(r.is_sat());
  CHECK(r.model.at("x") < Rational(2));

  // exists x: forall y: y <= x is false over unbounded integers.
  Formula g = Formula::forall({"y"}, Formula::lit(lit({{"y", 1}, {"x", -1}}, RelOp::Le, 0)));
  CHECK(s.check_quantified(kX, g).status == SatStatus::Unsat);

  // exists x: forall y: (y>1 -> y>=x): any x <= 2.
  Formula h = Formula::forall(
      {"y"}, Formula::disj({Formula::negate(Formula::lit(lit({{"y", 1}}, RelOp::Gt, 1))),
                            Formula::lit(lit({{"y", 1}, {"x", -1}}, RelOp::Ge, 0))}));
  SatResult hr = s.check_quantified(kX, h);
  REQUIRE(hr.is_sat());
  CHECK(hr.model.at("x") <= Rational(2));
  CHECK(s.depth() == 0);
}

TEST_CASE("push/pop bracket every query") {
  Session s = testsupport::session(Sort::Int);
  s.push();
  s.declare("y");
  s.assert_formula(Formula::lit(lit({{"y", 1}}, RelOp::Ge, 5)));
  CHECK(s.depth() == 1);
  SatResult inner =
      s.solve_exists(kX, conj({lit({{"x", 1}}, RelOp::Eq, 3)}));  // nested scope
  CHECK(inner.is_sat());
  CHECK(s.depth() == 1);
  CHECK(s.check() == SatStatus::Sat);
  s.pop();
  CHECK(s.depth() == 0);
  CHECK_THROWS_AS(s.pop(), ContractViolation);
}

TEST_CASE("rational values cross the boundary exactly") {
  Session s = testsupport::session(Sort::Real);
  SatResult r = s.solve_exists(
      kY, conj({lit({{"y", 2}}, RelOp::Eq, Rational(-3))}));  // 2y = -3
  REQUIRE(r.is_sat());
  CHECK(r.model.at("y") == Rational(-3, 2));
}

TEST_CASE("a stalled solver trips the timeout") {
  SolverConfig cfg;
  cfg.command = {"/bin/sh", "-c", "sleep 30"};
  cfg.sort = Sort::Int;
  cfg.timeout_ms = 150;
  Session s = Session::start(cfg);
  CHECK_THROWS_AS(s.check(), SolverTimeout);
  // The session is dead afterwards.
  CHECK_THROWS_AS(s.check(), SolverProtocolError);
}

TEST_CASE("smt2 serialization shapes") {
  Formula f = Formula::exists({"y"}, conj({lit({{"y", 1}, {"x", -1}}, RelOp::Le, 0)}));
  CHECK(to_smt2(f, Sort::Int) == "(exists ((|y| Int)) (<= (+ (* -1 |x|) (* 1 |y|)) 0))");
  CHECK(to_smt2(Formula::lit(lit({{"y", 1}}, RelOp::Ne, 0)), Sort::Int) ==
        "(not (= (* 1 |y|) 0))");
  CHECK(to_smt2(Formula::lit(lit({{"y", 2}}, RelOp::Eq, Rational(-3))), Sort::Real) ==
        "(= (* 2 |y|) (- 3))");
}

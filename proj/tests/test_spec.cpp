#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "synthmt/errors.hpp"
#include "synthmt/spec_ast.hpp"

using namespace synthmt;
using testsupport::lit;

namespace {

SpecAst parse(const std::string& text) { return parse_spec(text, "test.spec"); }

const char* kRunningInt =
    "theory Int\nenv x\nsys y\nspec G(((x<2) -> X(y>1)) & ((x>=2) -> (y<x)))\n";

}  // namespace

TEST_CASE("running example parses to three distinct literals") {
  SpecAst ast = parse(kRunningInt);
  CHECK(ast.sort == Sort::Int);
  CHECK(ast.env_vars == std::vector<std::string>{"x"});
  CHECK(ast.sys_vars == std::vector<std::string>{"y"});

  std::vector<Literal> lits = extract_literals(ast);
  REQUIRE(lits.size() == 3);
  CHECK(lits[0] == lit({{"x", 1}}, RelOp::Lt, 2));
  CHECK(lits[1] == lit({{"y", 1}}, RelOp::Gt, 1));
  CHECK(lits[2] == lit({{"y", 1}, {"x", -1}}, RelOp::Lt, 0));
}

TEST_CASE("modified example swaps the third literal") {
  SpecAst ast = testsupport::load_spec("running_mod_int.spec");
  std::vector<Literal> lits = extract_literals(ast);
  REQUIRE(lits.size() == 3);
  CHECK(lits[2] == lit({{"y", 1}, {"x", -1}}, RelOp::Le, 0));
  CHECK(lits[2].text() == "1*y + -1*x <= 0");
}

TEST_CASE("duplicate atoms collapse") {
  SpecAst ast = parse("theory Int\nenv x\nsys y\nspec G(((x<2) -> (y>1)) & ((x<2) -> (y>0)))\n");
  CHECK(extract_literals(ast).size() == 3);

  // An atom and its complement share one index.
  SpecAst c = parse("theory Int\nenv x\nsys y\nspec G((y>0) | (y<=0))\n");
  CHECK(extract_literals(c).size() == 1);
}

TEST_CASE("single-conjunct smoke case") {
  SpecAst ast = parse("theory Int\nenv x\nsys y\nspec G((x<2) -> X(y>1))\n");
  SafetyMatrix m = normalize_safety(ast);
  CHECK(m.conjuncts.size() == 1);
  CHECK(m.conjunct_text(0) == "(s0 -> X(s1))");
}

TEST_CASE("until is rejected at parse time") {
  CHECK_THROWS_WITH_AS(parse("theory Int\nenv x\nsys y\nspec (x<2) U (y>1)\n"),
                       doctest::Contains("safety fragment"), ParseError);
  CHECK_THROWS_AS(parse("theory Int\nenv x\nsys y\nspec F(y>1)\n"), ParseError);
  CHECK_THROWS_AS(parse("theory Int\nenv x\nsys y\nspec (x<2) R (y>1)\n"), ParseError);
}

TEST_CASE("parse errors carry file, line, and column") {
  try {
    parse("theory Int\nenv x\nsys y\nspec G(x <? 2)\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.file == "test.spec");
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("test.spec:4:") == 0);
  }
}

TEST_CASE("undeclared variables and sort mismatches are rejected") {
  CHECK_THROWS_WITH_AS(parse("theory Int\nenv x\nsys y\nspec G(z < 2)\n"),
                       doctest::Contains("undeclared variable 'z'"), ParseError);
  CHECK_THROWS_WITH_AS(parse("theory Int\nenv x\nsys y\nspec G(y < 1.5)\n"),
                       doctest::Contains("mixed sorts"), ParseError);
  CHECK_NOTHROW(parse("theory Real\nenv x\nsys y\nspec G(y < 1.5)\n"));
  CHECK_THROWS_AS(parse("theory Int\nenv x\nsys x\nspec G(x < 2)\n"), ParseError);
  CHECK_THROWS_AS(parse("theory Int\nenv x\nspec G(x < 2)\n"), ParseError);
  CHECK_THROWS_AS(parse("theory Int\nenv G\nsys y\nspec G(y > 1)\n"), ParseError);
  CHECK_THROWS_AS(parse("theory Int\nenv x\nsys y\nspec G(x*y < 2)\n"), ParseError);
  CHECK_THROWS_AS(parse("theory Int\nenv x\nsys y\nspec G(1 < 2)\n"), ParseError);
}

TEST_CASE("normalize accepts the safety fragment only") {
  CHECK_THROWS_AS(normalize_safety(parse("theory Int\nenv x\nsys y\nspec G(G(y>1))\n")),
                  UnsupportedFragment);
  CHECK_THROWS_AS(normalize_safety(parse("theory Int\nenv x\nsys y\nspec G(X(X(y>1)))\n")),
                  UnsupportedFragment);
  CHECK_THROWS_AS(normalize_safety(parse("theory Int\nenv x\nsys y\nspec G(X((y>1)&(x<2)))\n")),
                  UnsupportedFragment);
  CHECK_THROWS_AS(normalize_safety(parse("theory Int\nenv x\nsys y\nspec (y>1)\n")),
                  UnsupportedFragment);
  CHECK_THROWS_AS(normalize_safety(parse("theory Int\nenv x\nsys y\nspec G(X(y>1))\n")),
                  UnsupportedFragment);  // no current-step atom anywhere
}

TEST_CASE("running example normalizes to the two-conjunct matrix") {
  SafetyMatrix m = normalize_safety(parse(kRunningInt));
  REQUIRE(m.conjuncts.size() == 2);
  CHECK(m.num_literals == 3);
  CHECK(m.conjunct_text(0) == "(s0 -> X(s1))");
  CHECK(m.conjunct_text(1) == "(!s0 -> s2)");

  // Semantics: current atoms from the first argument, next atoms from the second.
  CHECK(m.eval(0b001, 0b010));   // s0 holds, next s1 holds
  CHECK(!m.eval(0b001, 0b000));  // next s1 missing
  CHECK(m.eval(0b100, 0b000));   // !s0 with s2
  CHECK(!m.eval(0b000, 0b000));  // !s0 without s2
  CHECK(m.first_violation(0b001, 0b000) == 0);
  CHECK(m.first_violation(0b000, 0b000) == 1);
}

TEST_CASE("G distributes over conjunction") {
  SpecAst a = parse("theory Int\nenv x\nsys y\nspec G(((x<2) -> (y>1)) & ((x>=2) -> (y<x)))\n");
  SpecAst b =
      parse("theory Int\nenv x\nsys y\nspec G((x<2) -> (y>1)) & G((x>=2) -> (y<x))\n");
  SafetyMatrix ma = normalize_safety(a), mb = normalize_safety(b);
  REQUIRE(ma.conjuncts.size() == 2);
  REQUIRE(mb.conjuncts.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(ma.conjunct_text(i) == mb.conjunct_text(i));
}

TEST_CASE("render/parse round trip") {
  for (const char* name :
       {"running_int.spec", "running_real.spec", "running_mod_int.spec", "free_choice.spec",
        "stateless_int.spec"}) {
    SpecAst ast = testsupport::load_spec(name);
    SpecAst again = parse(render(ast));
    CHECK(again == ast);
  }
}

TEST_CASE("literal extraction is stable under formatting changes") {
  SpecAst noisy = parse(
      "theory Int\nenv x\nsys y\nspec   G( ( (x<2) ->   X((y>1)) ) & (((x>=2)) -> ((y<x))) )\n");
  CHECK(extract_literals(noisy) == extract_literals(parse(kRunningInt)));
}

TEST_CASE("semicolons separate directives") {
  SpecAst ast = parse("theory Int; env x; sys y; spec G((x<2) -> X(y>1))");
  CHECK(extract_literals(ast).size() == 2);
}

TEST_CASE("canonical literal text parses back") {
  Literal l = lit({{"y", 1}, {"x", -1}}, RelOp::Le, 0);
  CHECK(parse_literal_text(l.text(), {"x", "y"}, Sort::Int) == l);
  CHECK_THROWS_AS(parse_literal_text("1*z <= 0", {"x", "y"}, Sort::Int), ParseError);
}

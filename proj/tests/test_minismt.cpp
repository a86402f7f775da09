#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <sstream>

#include "doctest.h"
#include "minismt/qe.hpp"
#include "minismt/smtlib.hpp"
#include "minismt/solver.hpp"

using namespace minismt;

namespace {

LinTerm term(std::initializer_list<std::pair<std::string, Rat>> coeffs, Rat c) {
  LinTerm t;
  for (const auto& [v, k] : coeffs) t.add(v, k);
  t.constant = c;
  return t;
}

NodePtr atom(AtomKind k, std::initializer_list<std::pair<std::string, Rat>> coeffs, Rat c,
             std::int64_t modulus = 0) {
  return mk_atom(Atom{k, term(coeffs, c), modulus});
}

bool ground_true(const NodePtr& n) { return n->kind == Node::Kind::True; }
bool ground_false(const NodePtr& n) { return n->kind == Node::Kind::False; }

}  // namespace

TEST_CASE("atom normalization folds and reduces") {
  CHECK(ground_true(atom(AtomKind::Lt, {}, Rat(-1))));
  CHECK(ground_false(atom(AtomKind::Lt, {}, Rat(0))));
  CHECK(ground_true(atom(AtomKind::Dvd, {}, Rat(4), 2)));
  CHECK(ground_false(atom(AtomKind::Dvd, {}, Rat(3), 2)));

  // 2x - 4 < 0 reduces to x - 2 < 0.
  NodePtr a = atom(AtomKind::Lt, {{"x", Rat(2)}}, Rat(-4));
  NodePtr b = atom(AtomKind::Lt, {{"x", Rat(1)}}, Rat(-2));
  REQUIRE(a->kind == Node::Kind::Leaf);
  CHECK(a->atom == b->atom);

  // Rational coefficients scale to integers: x/2 - 1/4 <= 0 is 2x - 1 <= 0.
  NodePtr c = atom(AtomKind::Le, {{"x", Rat(1, 2)}}, Rat(-1, 4));
  CHECK(c->atom == atom(AtomKind::Le, {{"x", Rat(2)}}, Rat(-1))->atom);

  // Dvd content rule: 2 | 2x + 4 is 1 | x + 2, i.e. true.
  CHECK(ground_true(atom(AtomKind::Dvd, {{"x", Rat(2)}}, Rat(4), 2)));
  // 4 | 2x + 2 becomes 2 | x + 1.
  NodePtr d = atom(AtomKind::Dvd, {{"x", Rat(2)}}, Rat(2), 4);
  CHECK(d->atom == atom(AtomKind::Dvd, {{"x", Rat(1)}}, Rat(1), 2)->atom);
}

TEST_CASE("negation and nnf") {
  NodePtr a = atom(AtomKind::Lt, {{"x", Rat(1)}}, Rat(0));  // x < 0
  NodePtr na = mk_not(a);                                   // -x <= 0
  REQUIRE(na->kind == Node::Kind::Leaf);
  CHECK(na->atom.kind == AtomKind::Le);
  CHECK(eval(na, {{"x", Rat(0)}}));
  CHECK(!eval(na, {{"x", Rat(-1)}}));

  NodePtr f = mk_not(mk_and({a, mk_exists({{"y", VarSort::Int}},
                                          atom(AtomKind::Eq, {{"y", Rat(1)}}, Rat(0)))}));
  NodePtr g = nnf(f);
  // not(and(a, exists y. ...)) becomes or(not a, forall y. not ...).
  REQUIRE(g->kind == Node::Kind::Or);
  bool has_forall = false;
  for (const auto& k : g->kids) has_forall |= k->kind == Node::Kind::Forall;
  CHECK(has_forall);
}

TEST_CASE("integer QE: intervals and divisibility") {
  // exists x: 5 < x and x < 8
  NodePtr f = mk_and({atom(AtomKind::Lt, {{"x", Rat(-1)}}, Rat(5)),
                      atom(AtomKind::Lt, {{"x", Rat(1)}}, Rat(-8))});
  CHECK(ground_true(eliminate_int("x", f)));

  // exists x: 5 < x < 6 has no integer
  NodePtr g = mk_and({atom(AtomKind::Lt, {{"x", Rat(-1)}}, Rat(5)),
                      atom(AtomKind::Lt, {{"x", Rat(1)}}, Rat(-6))});
  CHECK(ground_false(eliminate_int("x", g)));

  // exists x: 2x = y  <=>  2 | y
  NodePtr h = eliminate_int("x", atom(AtomKind::Eq, {{"x", Rat(2)}, {"y", Rat(-1)}}, Rat(0)));
  CHECK(eval(h, {{"y", Rat(4)}}));
  CHECK(!eval(h, {{"y", Rat(3)}}));

  // exists x: y < 3x < y + 4 holds for every y (a multiple of 3 in any
  // open length-4 window).
  NodePtr w = mk_and({atom(AtomKind::Lt, {{"x", Rat(-3)}, {"y", Rat(1)}}, Rat(0)),
                      atom(AtomKind::Lt, {{"x", Rat(3)}, {"y", Rat(-1)}}, Rat(-4))});
  NodePtr we = eliminate_int("x", w);
  for (int y = -9; y <= 9; ++y) CHECK(eval(we, {{"y", Rat(y)}}));
}

TEST_CASE("real QE: density and strictness") {
  // exists x: 1 < x < 2 over the reals
  NodePtr f = mk_and({atom(AtomKind::Lt, {{"x", Rat(-1)}}, Rat(1)),
                      atom(AtomKind::Lt, {{"x", Rat(1)}}, Rat(-2))});
  CHECK(ground_true(eliminate_real("x", f)));

  // exists x: x < y and x > y is empty
  NodePtr g = mk_and({atom(AtomKind::Lt, {{"x", Rat(1)}, {"y", Rat(-1)}}, Rat(0)),
                      atom(AtomKind::Lt, {{"x", Rat(-1)}, {"y", Rat(1)}}, Rat(0))});
  CHECK(ground_false(eliminate_real("x", g)));

  // exists x: x = y/2 and x != z simplifies to true unless forced equal...
  NodePtr h = eliminate_real(
      "x", mk_and({atom(AtomKind::Eq, {{"x", Rat(2)}, {"y", Rat(-1)}}, Rat(0)),
                   atom(AtomKind::Ne, {{"x", Rat(1)}, {"z", Rat(-1)}}, Rat(0))}));
  CHECK(eval(h, {{"y", Rat(4)}, {"z", Rat(5)}}));
  CHECK(!eval(h, {{"y", Rat(4)}, {"z", Rat(2)}}));
}

TEST_CASE("context solves and models") {
  Context ctx;
  CHECK(ctx.check_sat() == CheckResult::Sat);  // empty stack

  ctx.declare("y", VarSort::Int);
  ctx.push();
  ctx.assert_node(mk_and({atom(AtomKind::Lt, {{"y", Rat(-1)}}, Rat(1)),    // y > 1
                          atom(AtomKind::Le, {{"y", Rat(1)}}, Rat(4))}));  // y <= 4
  REQUIRE(ctx.check_sat() == CheckResult::Sat);
  Rat y = ctx.model()->at("y");
  CHECK(y >= Rat(2));
  CHECK(y <= Rat(4));
  ctx.pop();

  ctx.push();
  ctx.assert_node(mk_and({atom(AtomKind::Lt, {{"y", Rat(-1)}}, Rat(1)),
                          atom(AtomKind::Lt, {{"y", Rat(1)}}, Rat(-2))}));  // y > 1, y < 2
  CHECK(ctx.check_sat() == CheckResult::Unsat);
  ctx.pop();

  CHECK_THROWS(ctx.declare("y", VarSort::Int));
}

TEST_CASE("random conjunctions agree with brute force over a window") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> coeff(-3, 3), cnst(-8, 8), natoms(1, 4), kind(0, 3);

  for (int round = 0; round < 300; ++round) {
    std::vector<NodePtr> atoms;
    int n = natoms(rng);
    for (int i = 0; i < n; ++i) {
      LinTerm t = term({{"x", Rat(coeff(rng))}, {"y", Rat(coeff(rng))}}, Rat(cnst(rng)));
      atoms.push_back(mk_atom(Atom{static_cast<AtomKind>(kind(rng)), t, 0}));
    }
    NodePtr f = mk_and(atoms);

    bool brute = false;
    for (int x = -12; x <= 12 && !brute; ++x)
      for (int y = -12; y <= 12 && !brute; ++y)
        brute = eval(f, {{"x", Rat(x)}, {"y", Rat(y)}});

    Context ctx;
    ctx.declare("x", VarSort::Int);
    ctx.declare("y", VarSort::Int);
    ctx.assert_node(f);
    CheckResult r = ctx.check_sat();
    REQUIRE(r != CheckResult::Unknown);

    if (brute) {
      // A window witness implies satisfiability.
      CHECK(r == CheckResult::Sat);
    }
    if (r == CheckResult::Sat) {
      // Any claimed model must actually satisfy the formula.
      CHECK(eval(f, *ctx.model()));
    } else {
      CHECK(!brute);
    }
  }
}

TEST_CASE("random exists-forall queries are self-consistent") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coeff(-2, 2), cnst(-5, 5), kind(0, 1);

  for (int round = 0; round < 150; ++round) {
    // forall y: (a1 x + b1 y + c1 <= 0) or (a2 x + b2 y + c2 < 0)
    NodePtr body = mk_or({atom(static_cast<AtomKind>(kind(rng)),
                               {{"x", Rat(coeff(rng))}, {"y", Rat(coeff(rng))}}, Rat(cnst(rng))),
                          atom(static_cast<AtomKind>(kind(rng)),
                               {{"x", Rat(coeff(rng))}, {"y", Rat(coeff(rng))}}, Rat(cnst(rng)))});
    NodePtr q = mk_forall({{"y", VarSort::Int}}, body);

    Context ctx;
    ctx.declare("x", VarSort::Int);
    ctx.assert_node(q);
    CheckResult r = ctx.check_sat();
    REQUIRE(r != CheckResult::Unknown);
    if (r == CheckResult::Sat) {
      Rat x = ctx.model()->at("x");
      for (int y = -40; y <= 40; ++y)  // necessary condition on a window
        CHECK(eval(body, {{"x", x}, {"y", Rat(y)}}));
    } else {
      for (int x = -10; x <= 10; ++x) {
        bool all = true;
        for (int y = -40; y <= 40 && all; ++y) all = eval(body, {{"x", Rat(x)}, {"y", Rat(y)}});
        if (all) {
          // The formula body is linear: a window-wide pass with margin makes a
          // real counterexample to unsat implausible; flag it.
          bool deep = true;
          for (int y = -200; y <= 200 && deep; ++y)
            deep = eval(body, {{"x", Rat(x)}, {"y", Rat(y)}});
          CHECK(!deep);
        }
      }
    }
  }
}

TEST_CASE("smtlib repl end to end") {
  std::istringstream in(R"((set-logic LIA)
(declare-const x Int)
(push 1)
(assert (and (< x 10) (> x 7)))
(check-sat)
(get-value (x))
(pop 1)
(push 1)
(assert (exists ((y Int)) (= (* 2 y) x)))
(assert (> x 4))
(assert (< x 7))
(check-sat)
(get-value (x))
(pop 1)
(exit)
)");
  std::ostringstream out;
  CHECK(run_smtlib(in, out) == 0);
  CHECK(out.str() == "sat\n((x 8))\nsat\n((x 6))\n");
}

TEST_CASE("smtlib repl reports errors and keeps going") {
  std::istringstream in(R"((declare-const x Int)
(assert (< z 1))
(assert (< x 1))
(check-sat)
(exit)
)");
  std::ostringstream out;
  CHECK(run_smtlib(in, out) == 0);
  CHECK(out.str().find("(error") == 0);
  CHECK(out.str().find("sat") != std::string::npos);
}

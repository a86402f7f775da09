#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "synthmt/errors.hpp"
#include "synthmt/runtime.hpp"

using namespace synthmt;
using testsupport::val;

namespace {

MealyController make_controller(const std::string& name) {
  SpecAst ast = testsupport::load_spec(name);
  Session session = testsupport::session(ast.sort);
  return synthesize(booleanize(ast, session));
}

ReactionSet rset(std::initializer_list<std::uint32_t> cubes) {
  ReactionSet r;
  for (std::uint32_t c : cubes) r.insert(c);
  return r;
}

Valuation in_x(std::int64_t x) { return val({{"x", Rational(x)}}); }

}  // namespace

TEST_CASE("policy parsing") {
  std::vector<std::string> sys{"y", "z"};
  Policy p = Policy::parse("min:y,target:z=prev", Sort::Int, sys);
  CHECK(p.rule("y").kind == PolicyRule::Kind::Min);
  CHECK(p.rule("z").kind == PolicyRule::Kind::TargetPrev);

  Policy q = Policy::parse("target:y=3/2", Sort::Real, sys);
  CHECK(q.rule("y").kind == PolicyRule::Kind::TargetValue);
  CHECK(q.rule("y").target == Rational(3, 2));
  CHECK(q.rule("z").kind == PolicyRule::Kind::Any);

  CHECK_THROWS_AS(Policy::parse("min:y", Sort::Real, sys), ContractViolation);
  CHECK_THROWS_AS(Policy::parse("min:w", Sort::Int, sys), ContractViolation);
  CHECK_THROWS_AS(Policy::parse("target:y=1.5", Sort::Int, sys), ContractViolation);
  CHECK_THROWS_AS(Policy::parse("min:y,min:y", Sort::Int, sys), ContractViolation);
  CHECK_THROWS_AS(Policy::parse("frobnicate:y", Sort::Int, sys), ContractViolation);
}

TEST_CASE("classify_input finds the stored partition") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);

  int k4 = classify_input(in_x(4), ctrl.spec, session);
  CHECK(ctrl.spec.extra(k4) == rset({2, 4, 6}));
  int k1 = classify_input(in_x(1), ctrl.spec, session);
  CHECK(ctrl.spec.extra(k1) == rset({3, 5}));
  int k0 = classify_input(in_x(0), ctrl.spec, session);
  CHECK(ctrl.spec.extra(k0) == rset({1, 3, 5}));

  // Wrong sort is rejected before any solver call.
  CHECK_THROWS_AS(classify_input(val({{"x", Rational(1, 2)}}), ctrl.spec, session),
                  ContractViolation);

  // A deleted partition makes classification fail loudly.
  BooleanSpec broken = ctrl.spec;
  broken.partitions.erase(broken.partitions.begin() + k1);
  CHECK_THROWS_AS(classify_input(in_x(1), broken, session), AbstractionIncomplete);
}

TEST_CASE("provider extrema on the appendix cube") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);
  RuntimeOptions verify;
  verify.verify_extrema = true;

  // Cube !s0 & s1 & s2 at x=4: models {2,3,4}.
  Cube c{6};
  ProvideResult least = provide_output(c, in_x(4), Policy::parse("min:y", Sort::Int, {"y"}),
                                       std::nullopt, ctrl.spec, session, verify);
  CHECK(least.output.at("y") == Rational(2));
  CHECK(!least.capped);

  ProvideResult greatest = provide_output(c, in_x(4), Policy::parse("max:y", Sort::Int, {"y"}),
                                          std::nullopt, ctrl.spec, session, verify);
  CHECK(greatest.output.at("y") == Rational(4));

  // Unique model at x=2.
  ProvideResult only = provide_output(c, in_x(2), Policy{}, std::nullopt, ctrl.spec, session);
  CHECK(only.output.at("y") == Rational(2));

  // Cube !s0 & !s1 & s2 at x=2 under max: greatest model is y=1.
  ProvideResult top = provide_output(Cube{4}, in_x(2), Policy::parse("max:y", Sort::Int, {"y"}),
                                     std::nullopt, ctrl.spec, session, verify);
  CHECK(top.output.at("y") == Rational(1));

  // Unbounded direction hits the optimization cap.
  RuntimeOptions small_cap;
  small_cap.optimization_cap = 64;
  ProvideResult capped = provide_output(Cube{4}, in_x(2), Policy::parse("min:y", Sort::Int, {"y"}),
                                        std::nullopt, ctrl.spec, session, small_cap);
  CHECK(capped.capped);
  CHECK(capped.output.at("y") <= Rational(1) - Rational(64));

  // A cube that is ground-false at the input is a corrupted artifact.
  CHECK_THROWS_AS(provide_output(Cube{7}, in_x(4), Policy{}, std::nullopt, ctrl.spec, session),
                  ProviderUnsat);
}

TEST_CASE("target policies try the target first and fall back") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);

  // Cube s0 & s1 & !s2 at x=0: y > 1.
  Cube c{3};
  ProvideResult hit = provide_output(c, in_x(0), Policy::parse("target:y=3", Sort::Int, {"y"}),
                                     std::nullopt, ctrl.spec, session);
  CHECK(hit.output.at("y") == Rational(3));

  ProvideResult miss = provide_output(c, in_x(0), Policy::parse("target:y=0", Sort::Int, {"y"}),
                                      std::nullopt, ctrl.spec, session);
  CHECK(miss.output.at("y") > Rational(1));  // any model

  Valuation prev = val({{"y", Rational(7)}});
  ProvideResult sticky = provide_output(c, in_x(0), Policy::parse("target:y=prev", Sort::Int, {"y"}),
                                        prev, ctrl.spec, session);
  CHECK(sticky.output.at("y") == Rational(7));
}

TEST_CASE("monitor semantics") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  const SafetyMatrix& m = ctrl.spec.matrix;

  // First step defers everything.
  CHECK(!monitor_step(std::nullopt, 0b000, m).has_value());

  // prev committed X(s1) (s0 held), cur lacks s1.
  auto verdict = monitor_step(0b001, 0b100, m);
  REQUIRE(verdict.has_value());
  CHECK(*verdict == "(s0 -> X(s1))");

  // Identical consecutive assignments satisfying the plain part are fine.
  CHECK(!monitor_step(0b110, 0b110, m).has_value());
}

TEST_CASE("the published five-step trace reproduces") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);
  Engine engine(ctrl, session, Policy::parse("min:y", Sort::Int, {"y"}));

  std::vector<Valuation> inputs;
  for (int x : {4, 4, 1, 0, 2}) inputs.push_back(in_x(x));
  std::vector<TraceStep> trace = engine.run_trace(inputs);

  REQUIRE(trace.size() == 5);
  for (const TraceStep& ts : trace) {
    CHECK(ts.ok());
    // Output satisfies every grounded cube constraint.
    Valuation full = ts.input;
    for (const auto& [n, v] : ts.output) full[n] = v;
    for (const Literal& l : cube_formula(Cube{ts.cube}, ctrl.spec.literals))
      CHECK(eval_ground(l, full));
  }

  // Steps 3 and 4 force y > 1; the minimum is 2.
  CHECK(trace[2].output.at("y") == Rational(2));
  CHECK(trace[3].output.at("y") == Rational(2));

  // Step 5: x=2 after a committed X(s1); the only winning cube is
  // !s0 & s1 & s2 and its sole model is y=2.
  CHECK(trace[4].cube == 6);
  CHECK(trace[4].output.at("y") == Rational(2));

  // The provider formula at step 5 is uniquely satisfied: adding y != 2 is unsat.
  std::vector<Formula> fs;
  std::set<std::string> sys{"y"};
  for (const Literal& l : cube_formula(Cube{6}, ctrl.spec.literals)) {
    GroundedLiteral g = ground(l, in_x(2), sys);
    if (!g.is_ground()) fs.push_back(Formula::lit(*g.residual));
  }
  fs.push_back(Formula::lit(Literal::make({{"y", Rational(1)}}, RelOp::Ne, Rational(2))));
  CHECK(session.solve_exists(std::vector<std::string>{"y"}, Formula::conj(std::move(fs))).status ==
        SatStatus::Unsat);
}

TEST_CASE("random traces never violate the monitor") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);
  Engine engine(ctrl, session, Policy{});
  for (const TraceStep& ts : engine.run_random(1000, 7, 100)) CHECK(ts.ok());
}

TEST_CASE("seeded runs are reproducible") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session s1 = testsupport::session(Sort::Int);
  Session s2 = testsupport::session(Sort::Int);
  Engine a(ctrl, s1, Policy{});
  Engine b(ctrl, s2, Policy{});
  std::vector<TraceStep> ta = a.run_random(50, 7, 100);
  std::vector<TraceStep> tb = b.run_random(50, 7, 100);
  REQUIRE(ta.size() == tb.size());
  for (size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].input == tb[i].input);
    CHECK(ta[i].output == tb[i].output);
    CHECK(ta[i].cube == tb[i].cube);
  }
}

TEST_CASE("real-sorted engine runs with half-integer inputs") {
  MealyController ctrl = make_controller("running_real.spec");
  Session session = testsupport::session(Sort::Real);
  Engine engine(ctrl, session, Policy::parse("target:y=3/2", Sort::Real, {"y"}));
  std::vector<TraceStep> trace = engine.run_random(200, 11, 8);
  for (const TraceStep& ts : trace) {
    CHECK(ts.ok());
    // The constant-3/2 strategy is always available on this spec.
    CHECK(ts.output.at("y") == Rational(3, 2));
  }
}

TEST_CASE("empty input list yields an empty trace") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);
  Engine engine(ctrl, session, Policy{});
  CHECK(engine.run_trace({}).empty());
}

TEST_CASE("trace steps render as stable JSON lines") {
  MealyController ctrl = make_controller("running_mod_int.spec");
  Session session = testsupport::session(Sort::Int);
  Engine engine(ctrl, session, Policy{});
  TraceStep ts = engine.step(in_x(4));
  std::string line = trace_step_json(ts);
  CHECK(line.find("\"step\":1") != std::string::npos);
  CHECK(line.find("\"in\":{\"x\":\"4\"}") != std::string::npos);
  CHECK(line.find("\"verdict\":\"ok\"") != std::string::npos);
}

TEST_CASE("assignment lines parse into env valuations") {
  Valuation v = parse_assignment_line("x=4", {"x"}, Sort::Int);
  CHECK(v.at("x") == Rational(4));
  CHECK_THROWS_AS(parse_assignment_line("x=1.5", {"x"}, Sort::Int), ContractViolation);
  CHECK(parse_assignment_line("x=-3/2", {"x"}, Sort::Real).at("x") == Rational(-3, 2));
  CHECK_THROWS_AS(parse_assignment_line("y=1", {"x"}, Sort::Int), ContractViolation);
  CHECK_THROWS_AS(parse_assignment_line("nonsense", {"x"}, Sort::Int), ContractViolation);
}

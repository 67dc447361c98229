// Interpreter semantics: branch distances, event attribution, faults,
// resource limits, and determinism.

#include "testutil.hpp"

namespace modgen {
namespace {

using test::check;
using test::construct;
using test::goal;
using test::invoke;
using test::loadChecked;
using test::makeTest;

// First If/While predicate in the sole method of an inline program.
const Expr& firstPredicate(const CheckedProgram& prog) {
  for (const auto& cls : prog.program.classes)
    for (const auto& m : cls.methods)
      for (const auto& s : m.body)
        if (s.kind == StmtKind::If || s.kind == StmtKind::While) return *s.expr;
  static Expr none;
  ADD_FAILURE() << "program has no predicate";
  return none;
}

struct DistCase {
  std::map<std::string, Value> bindings;
  Arm arm;
  double opposite;
};

// Distances below are hand-computed from the distance tables (K = 1), not
// derived from the implementation.
void expectDistances(const std::string& predicate, const std::string& params,
                     const std::vector<DistCase>& cases) {
  CheckedProgram prog = check("class D { int m(" + params + ") { if (" + predicate +
                              ") { return 1; } return 0; } }");
  const Expr& pred = firstPredicate(prog);
  for (size_t i = 0; i < cases.size(); ++i) {
    auto [arm, dist] = branchDistance(prog, pred, cases[i].bindings);
    EXPECT_EQ(arm, cases[i].arm) << predicate << " case " << i;
    EXPECT_DOUBLE_EQ(dist, cases[i].opposite) << predicate << " case " << i;
  }
}

std::map<std::string, Value> ints(long long a, long long b) {
  return {{"a", Value::intV(a)}, {"b", Value::intV(b)}};
}

// --------------------------------------------------------------------------
// Branch distance tables
// --------------------------------------------------------------------------

TEST(Distance, IntEquality) {
  expectDistances("a == b", "int a, int b",
                  {{ints(5, 5), Arm::True, 1.0},
                   {ints(5, 8), Arm::False, 4.0},
                   {ints(-3, 3), Arm::False, 7.0}});
}

TEST(Distance, IntInequality) {
  expectDistances("a != b", "int a, int b",
                  {{ints(5, 8), Arm::True, 4.0}, {ints(5, 5), Arm::False, 1.0}});
}

TEST(Distance, IntLess) {
  expectDistances("a < b", "int a, int b",
                  {{ints(1, 5), Arm::True, 5.0},
                   {ints(9, 5), Arm::False, 5.0},
                   {ints(5, 5), Arm::False, 1.0}});
}

TEST(Distance, IntLessEqual) {
  expectDistances("a <= b", "int a, int b",
                  {{ints(5, 5), Arm::True, 1.0}, {ints(6, 5), Arm::False, 2.0}});
}

TEST(Distance, GreaterDesugarsToSwappedLess) {
  expectDistances("a > b", "int a, int b",
                  {{ints(7, 3), Arm::True, 5.0}, {ints(3, 7), Arm::False, 5.0}});
}

TEST(Distance, BoolComparisonsAreFlat) {
  expectDistances("a == b", "bool a, bool b",
                  {{{{"a", Value::boolV(true)}, {"b", Value::boolV(true)}},
                    Arm::True, 1.0},
                   {{{"a", Value::boolV(true)}, {"b", Value::boolV(false)}},
                    Arm::False, 1.0}});
}

TEST(Distance, BareBoolAtomIsFlat) {
  expectDistances("a", "bool a",
                  {{{{"a", Value::boolV(true)}}, Arm::True, 1.0},
                   {{{"a", Value::boolV(false)}}, Arm::False, 1.0}});
}

TEST(Distance, StrComparisonsAreFlat) {
  expectDistances("a == b", "str a, str b",
                  {{{{"a", Value::strV("x")}, {"b", Value::strV("x")}},
                    Arm::True, 1.0},
                   {{{"a", Value::strV("x")}, {"b", Value::strV("yyy")}},
                    Arm::False, 1.0}});
}

TEST(Distance, NullComparisonsAreFlat) {
  expectDistances("a == null", "D a",
                  {{{{"a", Value::nullV()}}, Arm::True, 1.0},
                   {{{"a", Value::refV(3)}}, Arm::False, 1.0}});
}

TEST(Distance, ConjunctionSumsTrueDistancesAndMinsFalse) {
  // a < b && c < d; both operands always evaluated.
  std::string params = "int a, int b, int c, int d";
  auto bind = [](long long a, long long b, long long c, long long d) {
    return std::map<std::string, Value>{{"a", Value::intV(a)},
                                        {"b", Value::intV(b)},
                                        {"c", Value::intV(c)},
                                        {"d", Value::intV(d)}};
  };
  expectDistances("a < b && c < d", params,
                  {{bind(1, 5, 9, 3), Arm::False, 7.0},   // dTrue = 0 + 7
                   {bind(9, 5, 8, 2), Arm::False, 12.0},  // dTrue = 5 + 7
                   {bind(1, 5, 2, 9), Arm::True, 5.0}});  // dFalse = min(5, 8)
}

TEST(Distance, DisjunctionMinsTrueDistancesAndSumsFalse) {
  std::string params = "int a, int b, int c, int d";
  auto bind = [](long long a, long long b, long long c, long long d) {
    return std::map<std::string, Value>{{"a", Value::intV(a)},
                                        {"b", Value::intV(b)},
                                        {"c", Value::intV(c)},
                                        {"d", Value::intV(d)}};
  };
  expectDistances("a == b || c == d", params,
                  {{bind(1, 2, 3, 4), Arm::False, 2.0},  // dTrue = min(2, 2)
                   {bind(1, 1, 3, 4), Arm::True, 1.0}}); // dFalse = 1 + 0
}

TEST(Distance, NegatedComparisonKeepsGradient) {
  // !(a < b) parses as b <= a, so the distance still scales with |a - b|.
  expectDistances("!(a < b)", "int a, int b",
                  {{ints(3, 9), Arm::False, 7.0}, {ints(9, 3), Arm::True, 7.0}});
}

TEST(Distance, OppositeDistanceIsStrictlyPositiveInTraces) {
  CheckedProgram prog = loadChecked("album.moo");
  TestCase t = makeTest(
      prog, {construct("v0", "Album"),
             invoke("v1", "v0", "getPrice", {TestArg::ofLit(Value::strV("ab12cd"))}),
             invoke("v2", "v0", "getPrice", {TestArg::ofLit(Value::strV(""))})});
  ExecutionTrace tr = executeTest(prog, t);
  ASSERT_FALSE(tr.events.empty());
  for (const auto& e : tr.events) EXPECT_GT(e.oppositeDistance, 0.0);
}

// --------------------------------------------------------------------------
// Event recording and root attribution
// --------------------------------------------------------------------------

TEST(Events, CalleeBranchesAttributeToInvokedRoot) {
  CheckedProgram prog = loadChecked("album.moo");
  TestCase t = makeTest(
      prog, {construct("v0", "Album"),
             invoke("v1", "v0", "getPrice", {TestArg::ofLit(Value::strV("$5a"))})});
  ExecutionTrace tr = executeTest(prog, t);

  // "$5a": the while header fires 4x, contains 3x, plus both getPrice ifs.
  ASSERT_EQ(tr.events.size(), 9u);
  for (const auto& e : tr.events) EXPECT_EQ(e.rootMethod, "Album.getPrice");
  EXPECT_TRUE(attributedEvents(tr, "Album.stripString").empty());
  EXPECT_EQ(attributedEvents(tr, "Album.getPrice").size(), 9u);

  std::set<BranchGoalId> seen;
  for (const auto& e : tr.events) seen.insert(e.goalTaken);
  EXPECT_TRUE(seen.count(goal("Album.stripString", 0, Arm::True)));
  EXPECT_TRUE(seen.count(goal("Album.stripString", 0, Arm::False)));
  EXPECT_TRUE(seen.count(goal("Album.stripString", 1, Arm::True)));
  EXPECT_TRUE(seen.count(goal("Album.stripString", 1, Arm::False)));
  EXPECT_TRUE(seen.count(goal("Album.getPrice", 0, Arm::False)));
  EXPECT_TRUE(seen.count(goal("Album.getPrice", 1, Arm::False)));
}

TEST(Events, DirectCallAttributesToItself) {
  CheckedProgram prog = loadChecked("album.moo");
  TestCase t = makeTest(
      prog,
      {construct("v0", "Album"),
       invoke("v1", "v0", "stripString",
              {TestArg::ofLit(Value::strV("a1")), TestArg::ofLit(Value::strV("1"))})});
  ExecutionTrace tr = executeTest(prog, t);
  ASSERT_FALSE(tr.events.empty());
  for (const auto& e : tr.events) EXPECT_EQ(e.rootMethod, "Album.stripString");
}

TEST(Events, ConstructorBranchesRootAtInit) {
  CheckedProgram prog = check(
      "class C {\n"
      "  public int v;\n"
      "  C(int x) { if (x < 0) { this.v = 0 - x; } else { this.v = x; } }\n"
      "}");
  TestCase t =
      makeTest(prog, {construct("v0", "C", {TestArg::ofLit(Value::intV(-5))})});
  ExecResult res = executeTestDetailed(prog, t);
  ASSERT_EQ(res.trace.events.size(), 1u);
  EXPECT_EQ(res.trace.events[0].rootMethod, "C.<init>");
  EXPECT_EQ(res.trace.events[0].goalTaken, goal("C.<init>", 0, Arm::True));

  // The negation branch actually ran.
  ASSERT_EQ(res.vars.count("v0"), 1u);
  const HeapObject& obj = res.heap.at(res.vars.at("v0").heapId);
  EXPECT_EQ(obj.fields.at("v"), Value::intV(5));
}

TEST(Events, StaticCallRootsAtQualifiedName) {
  CheckedProgram prog = loadChecked("staticutil.moo");
  TestCase t = makeTest(
      prog, {test::staticInvoke("v0", "MathKit", "clamp",
                                {TestArg::ofLit(Value::intV(5)),
                                 TestArg::ofLit(Value::intV(0)),
                                 TestArg::ofLit(Value::intV(10))})});
  ExecutionTrace tr = executeTest(prog, t);
  ASSERT_FALSE(tr.events.empty());
  for (const auto& e : tr.events) EXPECT_EQ(e.rootMethod, "MathKit.clamp");
}

TEST(Events, LiteralAndSetFieldStatementsEmitNoEvents) {
  CheckedProgram prog = loadChecked("artists.moo");
  TestCase t = makeTest(
      prog, {construct("v0", "Artists"),
             test::literalStmt("v1", Value::strV("x")),
             test::setField("v0", "artists", TestArg::ofVar("v1"))});
  ExecutionTrace tr = executeTest(prog, t);
  EXPECT_TRUE(tr.events.empty());
  EXPECT_TRUE(tr.completed());
}

// --------------------------------------------------------------------------
// Faults
// --------------------------------------------------------------------------

TEST(Faults, NullReceiverInsideMethodFaults) {
  CheckedProgram prog = check(
      "class P {\n"
      "  int probe() { return 1; }\n"
      "  int hit(P other, int x) {\n"
      "    if (x < 10) { x = x + 1; }\n"
      "    return other.probe();\n"
      "  }\n"
      "}");
  TestCase t = makeTest(
      prog, {construct("v0", "P"),
             invoke("v1", "v0", "hit",
                    {TestArg::ofLit(Value::nullV()), TestArg::ofLit(Value::intV(3))})});
  ExecutionTrace tr = executeTest(prog, t);
  EXPECT_EQ(tr.outcome, TraceOutcome::RuntimeFault);
  EXPECT_EQ(tr.fault, FaultKind::NullDeref);
  // Events before the fault are retained.
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_EQ(tr.events[0].goalTaken, goal("P.hit", 0, Arm::True));
}

TEST(Faults, NullFieldAccessFaults) {
  CheckedProgram prog = check(
      "class N { public N next; int touch() { return this.next.touch(); } }");
  TestCase t = makeTest(prog, {construct("v0", "N"), invoke("v1", "v0", "touch")});
  ExecutionTrace tr = executeTest(prog, t);
  EXPECT_EQ(tr.outcome, TraceOutcome::RuntimeFault);
  EXPECT_EQ(tr.fault, FaultKind::NullDeref);
}

TEST(Faults, CharAtOutOfRangeFaults) {
  CheckedProgram prog = check(
      "class S { str at(str s, int i) { return s.charAt(i); } }");
  auto run = [&](long long idx) {
    TestCase t = makeTest(
        prog, {construct("v0", "S"),
               invoke("v1", "v0", "at",
                      {TestArg::ofLit(Value::strV("ab")), TestArg::ofLit(Value::intV(idx))})});
    return executeTest(prog, t);
  };
  EXPECT_EQ(run(1).outcome, TraceOutcome::Completed);
  EXPECT_EQ(run(2).fault, FaultKind::IndexOutOfRange);
  EXPECT_EQ(run(-1).fault, FaultKind::IndexOutOfRange);
}

TEST(Faults, SubstringBoundsChecked) {
  CheckedProgram prog = check(
      "class S { str cut(str s, int f, int t) { return s.substring(f, t); } }");
  auto run = [&](long long f, long long to) {
    TestCase t = makeTest(
        prog, {construct("v0", "S"),
               invoke("v1", "v0", "cut",
                      {TestArg::ofLit(Value::strV("abc")), TestArg::ofLit(Value::intV(f)),
                       TestArg::ofLit(Value::intV(to))})});
    return executeTestDetailed(prog, t);
  };
  ExecResult ok = run(1, 3);
  EXPECT_TRUE(ok.trace.completed());
  EXPECT_EQ(ok.vars.at("v1"), Value::strV("bc"));
  EXPECT_EQ(run(0, 0).trace.outcome, TraceOutcome::Completed);  // empty slice
  EXPECT_EQ(run(2, 1).trace.fault, FaultKind::IndexOutOfRange);
  EXPECT_EQ(run(0, 4).trace.fault, FaultKind::IndexOutOfRange);
}

TEST(Faults, IndexOfMissReturnsMinusOneWithoutFault) {
  CheckedProgram prog = check(
      "class S { int find(str s) { return s.indexOf(\"zz\"); } }");
  TestCase t = makeTest(prog, {construct("v0", "S"),
                               invoke("v1", "v0", "find",
                                      {TestArg::ofLit(Value::strV("abc"))})});
  ExecResult res = executeTestDetailed(prog, t);
  EXPECT_TRUE(res.trace.completed());
  EXPECT_EQ(res.vars.at("v1"), Value::intV(-1));
}

TEST(Faults, GuardedNullParameterDoesNotFault) {
  CheckedProgram prog = loadChecked("rect.moo");
  TestCase t = makeTest(
      prog,
      {construct("v0", "Rect",
                 {TestArg::ofLit(Value::intV(2)), TestArg::ofLit(Value::intV(3))}),
       invoke("v1", "v0", "fitsIn", {TestArg::ofLit(Value::nullV())})});
  ExecResult res = executeTestDetailed(prog, t);
  ASSERT_TRUE(res.trace.completed());
  EXPECT_EQ(res.vars.at("v1"), Value::boolV(false));
}

TEST(Faults, FaultStopsTestButKeepsEarlierStatements) {
  CheckedProgram prog = check(
      "class P {\n"
      "  int probe() { return 1; }\n"
      "  int hit(P other) { return other.probe(); }\n"
      "}");
  TestCase t = makeTest(
      prog, {construct("v0", "P"),
             invoke("v1", "v0", "probe"),
             invoke("v2", "v0", "hit", {TestArg::ofLit(Value::nullV())}),
             invoke("v3", "v0", "probe")});
  ExecResult res = executeTestDetailed(prog, t);
  EXPECT_EQ(res.trace.fault, FaultKind::NullDeref);
  // v1 bound before the fault, v3 never executed.
  EXPECT_EQ(res.vars.count("v1"), 1u);
  EXPECT_EQ(res.vars.count("v3"), 0u);
}

// --------------------------------------------------------------------------
// Limits
// --------------------------------------------------------------------------

TEST(Limits, StepLimitTripsOnInfiniteLoop) {
  CheckedProgram prog = check(
      "class L { int spin() { i = 0; while (0 < 1) { i = i + 1; } return i; } }");
  TestCase t = makeTest(prog, {construct("v0", "L"), invoke("v1", "v0", "spin")});
  ExecLimits limits;
  limits.stepLimit = 500;
  ExecutionTrace tr = executeTest(prog, t, limits);
  EXPECT_EQ(tr.outcome, TraceOutcome::StepLimit);
  EXPECT_EQ(tr.steps, limits.stepLimit + 1);
}

TEST(Limits, RunawayRecursionReportsStepLimit) {
  CheckedProgram prog = check(
      "class R { int rec(int n) { return this.rec(n + 1); } }");
  TestCase t = makeTest(prog, {construct("v0", "R"),
                               invoke("v1", "v0", "rec", {TestArg::ofLit(Value::intV(0))})});
  ExecLimits limits;
  limits.callDepthLimit = 32;
  ExecutionTrace tr = executeTest(prog, t, limits);
  EXPECT_EQ(tr.outcome, TraceOutcome::StepLimit);
  EXPECT_LT(tr.steps, 10000);
}

// --------------------------------------------------------------------------
// Language semantics observable through execution
// --------------------------------------------------------------------------

TEST(Semantics, FieldsStartAtTypeDefaults) {
  CheckedProgram prog = check(
      "class D {\n"
      "  public int i; public bool b; public str s; public D next;\n"
      "  int geti() { return i; }\n"
      "  bool getb() { return b; }\n"
      "  str gets() { return s; }\n"
      "  bool hasNext() { if (next == null) { return false; } return true; }\n"
      "}");
  TestCase t = makeTest(prog, {construct("v0", "D"),
                               invoke("v1", "v0", "geti"),
                               invoke("v2", "v0", "getb"),
                               invoke("v3", "v0", "gets"),
                               invoke("v4", "v0", "hasNext")});
  ExecResult res = executeTestDetailed(prog, t);
  ASSERT_TRUE(res.trace.completed());
  EXPECT_EQ(res.vars.at("v1"), Value::intV(0));
  EXPECT_EQ(res.vars.at("v2"), Value::boolV(false));
  EXPECT_EQ(res.vars.at("v3"), Value::strV(""));
  EXPECT_EQ(res.vars.at("v4"), Value::boolV(false));
}

TEST(Semantics, LocalsDefaultInitializedAtEntry) {
  CheckedProgram prog = check(
      "class D { int m(bool c) { if (c) { x = 5; } return x; } }");
  auto run = [&](bool c) {
    TestCase t = makeTest(prog, {construct("v0", "D"),
                                 invoke("v1", "v0", "m", {TestArg::ofLit(Value::boolV(c))})});
    return executeTestDetailed(prog, t).vars.at("v1");
  };
  EXPECT_EQ(run(true), Value::intV(5));
  EXPECT_EQ(run(false), Value::intV(0));
}

TEST(Semantics, FallingOffNonVoidReturnsDefault) {
  CheckedProgram prog = check(
      "class D { int m(bool c) { if (c) { return 7; } } }");
  TestCase t = makeTest(prog, {construct("v0", "D"),
                               invoke("v1", "v0", "m", {TestArg::ofLit(Value::boolV(false))})});
  ExecResult res = executeTestDetailed(prog, t);
  ASSERT_TRUE(res.trace.completed());
  EXPECT_EQ(res.vars.at("v1"), Value::intV(0));
}

TEST(Semantics, StringOperations) {
  CheckedProgram prog = check(
      "class S {\n"
      "  int len(str s) { return s.length(); }\n"
      "  bool has(str s, str n) { return s.contains(n); }\n"
      "  int at(str s, str n) { return s.indexOf(n); }\n"
      "  str join(str a, str b) { return a.concat(b); }\n"
      "  str ch(str s, int i) { return s.charAt(i); }\n"
      "}");
  auto call = [&](const std::string& m, std::vector<TestArg> args) {
    TestCase t = makeTest(prog, {construct("v0", "S"), invoke("v1", "v0", m, args)});
    ExecResult res = executeTestDetailed(prog, t);
    EXPECT_TRUE(res.trace.completed()) << m;
    return res.vars.at("v1");
  };
  EXPECT_EQ(call("len", {TestArg::ofLit(Value::strV("abc"))}), Value::intV(3));
  EXPECT_EQ(call("has", {TestArg::ofLit(Value::strV("abc")), TestArg::ofLit(Value::strV("bc"))}),
            Value::boolV(true));
  EXPECT_EQ(call("has", {TestArg::ofLit(Value::strV("abc")), TestArg::ofLit(Value::strV(""))}),
            Value::boolV(true));
  EXPECT_EQ(call("at", {TestArg::ofLit(Value::strV("abcb")), TestArg::ofLit(Value::strV("b"))}),
            Value::intV(1));
  EXPECT_EQ(call("join", {TestArg::ofLit(Value::strV("ab")), TestArg::ofLit(Value::strV("cd"))}),
            Value::strV("abcd"));
  EXPECT_EQ(call("ch", {TestArg::ofLit(Value::strV("xyz")), TestArg::ofLit(Value::intV(2))}),
            Value::strV("z"));
}

TEST(Semantics, ObjectIdentityNotStructuralEquality) {
  CheckedProgram prog = check(
      "class D { bool same(D a, D b) { if (a == b) { return true; } return false; } }");
  TestCase t = makeTest(
      prog, {construct("v0", "D"), construct("v1", "D"),
             invoke("v2", "v0", "same", {TestArg::ofVar("v0"), TestArg::ofVar("v1")}),
             invoke("v3", "v0", "same", {TestArg::ofVar("v1"), TestArg::ofVar("v1")})});
  ExecResult res = executeTestDetailed(prog, t);
  ASSERT_TRUE(res.trace.completed());
  EXPECT_EQ(res.vars.at("v2"), Value::boolV(false));
  EXPECT_EQ(res.vars.at("v3"), Value::boolV(true));
}

TEST(Semantics, HeapMutationIsSharedAcrossReferences) {
  CheckedProgram prog = loadChecked("counter.moo");
  TestCase t = makeTest(prog, {construct("v0", "Counter"),
                               invoke("", "v0", "tick"),
                               invoke("", "v0", "tick"),
                               invoke("", "v0", "tick"),
                               invoke("v1", "v0", "phase")});
  ExecResult res = executeTestDetailed(prog, t);
  ASSERT_TRUE(res.trace.completed());
  // After three ticks the counter leaves both the ==0 and <3 phases.
  std::set<BranchGoalId> covered;
  for (const auto& e : res.trace.events) covered.insert(e.goalTaken);
  EXPECT_TRUE(covered.count(goal("Counter.phase", 0, Arm::False)));
  EXPECT_TRUE(covered.count(goal("Counter.phase", 1, Arm::False)));
}

// --------------------------------------------------------------------------
// Determinism
// --------------------------------------------------------------------------

TEST(Determinism, IdenticalTestsProduceIdenticalTraces) {
  CheckedProgram prog = loadChecked("tokenscan.moo");
  TestCase t = makeTest(
      prog, {construct("v0", "TokenScan"),
             invoke("v1", "v0", "countTokens", {TestArg::ofLit(Value::strV("a b,c;d"))}),
             invoke("v2", "v0", "countTokens", {TestArg::ofLit(Value::strV(""))})});
  std::string first = executeTest(prog, t).dump();
  std::string second = executeTest(prog, t).dump();
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, second);
}

TEST(Determinism, TraceDumpIsLineOriented) {
  CheckedProgram prog = loadChecked("counter.moo");
  TestCase t = makeTest(prog, {construct("v0", "Counter"), invoke("v1", "v0", "phase")});
  std::string dump = executeTest(prog, t).dump();
  EXPECT_NE(dump.find("Counter.phase#0:TRUE"), std::string::npos);
  EXPECT_NE(dump.find("outcome=COMPLETED"), std::string::npos);
}

}  // namespace
}  // namespace modgen

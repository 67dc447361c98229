#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgen/cluster.hpp"
#include "modgen/rng.hpp"
#include "modgen/testcase.hpp"

namespace modgen {

// Hard bound on test length after any operator; longer results fall back to
// the parent (crossover) or skip the growing step (mutation).
constexpr int kHardLengthCap = 60;

namespace detail {

// Raw single-point splice: first ceil(j*|a|) statements of `a` followed by
// the statements of `b` from position ceil(j*|b|). Suffix definitions that
// collide with a prefix definition are renumbered fresh (so j=0 and j=1
// reproduce a parent exactly); references into b's removed prefix dangle
// until typeRepair.
inline TestCase spliceTests(const TestCase& a, const TestCase& b, double j,
                            const CheckedProgram& prog) {
  int cutA = static_cast<int>(std::ceil(j * a.size()));
  int cutB = static_cast<int>(std::ceil(j * b.size()));
  TestCase out;
  out.statements.assign(a.statements.begin(), a.statements.begin() + cutA);
  std::set<std::string> taken;
  for (const auto& s : out.statements)
    if (!s.var.empty()) taken.insert(s.var);
  int next = std::max(a.nextVarIndex(), b.nextVarIndex());
  std::map<std::string, std::string> rename;
  auto renamed = [&](const std::string& var) {
    auto it = rename.find(var);
    return it == rename.end() ? var : it->second;
  };
  for (int i = cutB; i < b.size(); ++i) {
    TestStatement s = b.statements[static_cast<size_t>(i)];
    if (!s.receiver.empty()) s.receiver = renamed(s.receiver);
    for (auto& arg : s.args)
      if (arg.isVar) arg.var = renamed(arg.var);
    if (!s.var.empty() && taken.count(s.var)) {
      std::string fresh = "v" + std::to_string(next++);
      rename[s.var] = fresh;
      s.var = fresh;
    }
    if (!s.var.empty()) taken.insert(s.var);
    out.statements.push_back(std::move(s));
  }
  rebuildVarTypes(prog, out);
  return out;
}

inline std::optional<TestCase> repairForMode(const TestCase& test, const TestCluster& cluster,
                                             Rng& rng) {
  std::optional<TestCase> repaired = typeRepair(test, cluster, rng);
  if (repaired && cluster.mode == ClusterMode::Emote)
    repaired = enforceTargetSuffix(*repaired, cluster, rng);
  return repaired;
}

}  // namespace detail

// Single-point crossover at split fraction `j`. Offspring that cannot be
// repaired, or that exceed the hard length cap, are replaced by a copy of
// their first parent.
inline std::pair<TestCase, TestCase> crossoverTestsAt(const TestCase& p1, const TestCase& p2,
                                                      double j, const TestCluster& cluster,
                                                      Rng& rng) {
  auto offspring = [&](const TestCase& first, const TestCase& second) {
    TestCase spliced = detail::spliceTests(first, second, j, *cluster.prog);
    std::optional<TestCase> repaired = detail::repairForMode(spliced, cluster, rng);
    if (!repaired || repaired->size() > kHardLengthCap) return first;
    return *repaired;
  };
  return {offspring(p1, p2), offspring(p2, p1)};
}

inline std::pair<TestCase, TestCase> crossoverTests(const TestCase& p1, const TestCase& p2,
                                                    const TestCluster& cluster, Rng& rng) {
  return crossoverTestsAt(p1, p2, rng.unit(), cluster, rng);
}

namespace detail {

inline Value perturbLiteral(const Value& v, const TestCluster& cluster, Rng& rng) {
  switch (v.kind) {
    case ValueKind::Int: {
      long long delta = rng.intIn(1, 10);
      return Value::intV(rng.coin() ? v.i + delta : v.i - delta);
    }
    case ValueKind::Bool:
      return Value::boolV(!v.b);
    case ValueKind::Str: {
      static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
      std::string s = v.s;
      int op = static_cast<int>(rng.index(3));
      if (op == 0 || s.empty()) {  // insert
        size_t pos = rng.index(s.size() + 1);
        s.insert(s.begin() + pos, alphabet[rng.index(sizeof(alphabet) - 1)]);
      } else if (op == 1) {  // delete
        s.erase(s.begin() + rng.index(s.size()));
      } else {  // replace
        s[rng.index(s.size())] = alphabet[rng.index(sizeof(alphabet) - 1)];
      }
      return Value::strV(s);
    }
    default:
      return randomLiteral(cluster, Type::refT(""), rng);
  }
}

// Indices of literal-valued arguments of a statement.
inline std::vector<size_t> literalArgIndices(const TestStatement& s) {
  std::vector<size_t> out;
  for (size_t i = 0; i < s.args.size(); ++i)
    if (!s.args[i].isVar && s.args[i].literal.kind != ValueKind::Null) out.push_back(i);
  return out;
}

// Replaces the call/construct statement at index i with another cluster
// element of the same return type, keeping the bound variable name so later
// references stay valid. Returns false when no replacement fits.
inline bool swapStatement(TestCase& test, int i, const TestCluster& cluster, Rng& rng) {
  TestStatement original = test.statements[static_cast<size_t>(i)];
  Type produced = Type::voidT();
  {
    Materializer typer(cluster, test, rng);
    if (!original.var.empty()) produced = typer.definedType(original);
  }

  std::vector<Action> candidates;
  for (const auto& action : allActions(cluster)) {
    if (action.isField) continue;
    const MethodDesc& d = action.method;
    if (d.className == original.className && d.method == original.method &&
        !original.method.empty())
      continue;
    if (d.isCtor && original.kind == TestStmtKind::Construct && d.className == original.className)
      continue;
    Type t = d.isCtor ? Type::refT(d.className) : d.def->returnType;
    if (original.var.empty() ? t.isVoid() : t == produced) candidates.push_back(action);
  }
  if (candidates.empty()) return false;
  const MethodDesc d = candidates[rng.index(candidates.size())].method;

  TestStatement repl;
  if (d.isCtor) {
    repl.kind = TestStmtKind::Construct;
    repl.className = d.className;
  } else if (d.isStatic) {
    repl.kind = TestStmtKind::StaticInvoke;
    repl.className = d.className;
    repl.method = d.method;
  } else {
    repl.kind = TestStmtKind::Invoke;
    repl.method = d.method;
  }
  repl.var = original.var;

  int cursor = i;
  Materializer mat(cluster, test, rng);
  if (repl.kind == TestStmtKind::Invoke) {
    std::optional<std::string> recv = mat.makeReceiver(d.className, cursor);
    if (!recv) return false;
    repl.receiver = *recv;
  }
  for (const auto& p : d.def->params) {
    std::optional<TestArg> arg = mat.makeArg(p.type, cursor, 0);
    if (!arg) return false;
    repl.args.push_back(std::move(*arg));
  }
  test.statements[static_cast<size_t>(cursor)] = std::move(repl);
  return true;
}

inline void modifyStatement(TestCase& test, int i, const TestCluster& cluster, Rng& rng) {
  TestStatement& s = test.statements[static_cast<size_t>(i)];
  if (s.kind == TestStmtKind::Literal) {
    s.literal = perturbLiteral(s.literal, cluster, rng);
    return;
  }
  std::vector<size_t> lits = literalArgIndices(s);
  bool preferPerturb = !lits.empty() && rng.coin();
  if (s.kind == TestStmtKind::SetField || preferPerturb) {
    if (!lits.empty()) {
      size_t k = lits[rng.index(lits.size())];
      s.args[k].literal = perturbLiteral(s.args[k].literal, cluster, rng);
    }
    return;
  }
  swapStatement(test, i, cluster, rng);  // reference `s` is invalid after this
}

}  // namespace detail

// Three-phase mutation: per-statement deletion, per-statement modification,
// then geometric insertion (p = 0.5). The effective per-statement rate is
// config-supplied or adaptive 1/length. EMOTE tests get their target suffix
// re-enforced; an unrepaired or over-cap result falls back to the input.
inline TestCase mutateTest(const TestCase& input, const TestCluster& cluster,
                           double mutationRate, Rng& rng) {
  TestCase test = input;
  double rate = mutationRate > 0.0
                    ? mutationRate
                    : 1.0 / std::max(1, test.size());

  bool deleted = false;
  for (int i = test.size() - 1; i >= 0; --i)
    if (rng.chance(rate)) {
      test.statements.erase(test.statements.begin() + i);
      deleted = true;
    }
  if (deleted) {
    std::optional<TestCase> repaired = typeRepair(test, cluster, rng);
    if (!repaired) return input;  // saturated: skip this mutation
    test = *repaired;
  }

  for (int i = 0; i < test.size(); ++i)
    if (rng.chance(rate)) detail::modifyStatement(test, i, cluster, rng);

  while (rng.chance(0.5) && test.size() < kHardLengthCap) {
    std::optional<TestCase> grown = randomStatementInsertion(test, cluster, rng);
    if (!grown) break;
    test = *grown;
  }

  if (cluster.mode == ClusterMode::Emote) {
    std::optional<TestCase> suffixed = enforceTargetSuffix(test, cluster, rng);
    if (!suffixed) return input;
    test = *suffixed;
  }
  if (test.size() > kHardLengthCap) return input;
  rebuildVarTypes(*cluster.prog, test);
  return test;
}

}  // namespace modgen

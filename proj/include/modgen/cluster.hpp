#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgen/rng.hpp"
#include "modgen/testcase.hpp"
#include "modgen/typecheck.hpp"

namespace modgen {

enum class ClusterMode { Whole, Strict, Emote };

inline const char* modeName(ClusterMode m) {
  switch (m) {
    case ClusterMode::Whole: return "whole";
    case ClusterMode::Strict: return "strict";
    case ClusterMode::Emote: return "emote";
  }
  return "?";
}

inline std::optional<ClusterMode> parseMode(const std::string& s) {
  if (s == "whole") return ClusterMode::Whole;
  if (s == "strict") return ClusterMode::Strict;
  if (s == "emote") return ClusterMode::Emote;
  return std::nullopt;
}

// A selectable method: target, setup method, constructor, or factory.
struct MethodDesc {
  std::string className;
  std::string method;  // plain name; "<init>" for constructors
  bool isStatic = false;
  bool isCtor = false;
  const MethodDef* def = nullptr;

  std::string qualified() const { return className + "." + method; }
  bool operator==(const MethodDesc& o) const {
    return className == o.className && method == o.method;
  }
};

struct FieldDesc {
  std::string className;
  std::string field;
  Type type;
};

struct TestCluster {
  ClusterMode mode = ClusterMode::Whole;
  std::string targetClass;
  std::string targetMethod;  // plain name
  const MethodDef* target = nullptr;

  std::vector<MethodDesc> testMethods;
  std::vector<MethodDesc> generators;   // constructors and factories
  std::vector<MethodDesc> modifiers;    // impure instance methods
  std::vector<FieldDesc> fieldSetters;  // public fields

  std::vector<long long> intPool;
  std::vector<std::string> strPool;

  const CheckedProgram* prog = nullptr;

  std::string targetQualified() const { return targetClass + "." + targetMethod; }

  // Generators producing a Ref of the given class.
  std::vector<MethodDesc> generatorsFor(const std::string& className) const {
    std::vector<MethodDesc> out;
    for (const auto& g : generators) {
      Type produced = g.isCtor ? Type::refT(g.className) : g.def->returnType;
      if (produced.isRef() && produced.className == className) out.push_back(g);
    }
    return out;
  }
};

namespace detail {

inline bool assignsOwnField(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::FieldAssign && s.receiver &&
        s.receiver->kind == ExprKind::ThisRef)
      return true;
    if (assignsOwnField(s.thenBody) || assignsOwnField(s.elseBody)) return true;
  }
  return false;
}

inline void collectThisCalls(const Expr& e, std::vector<std::string>& names) {
  if (e.kind == ExprKind::Call && e.recv && e.recv->kind == ExprKind::ThisRef)
    names.push_back(e.name);
  if (e.recv) collectThisCalls(*e.recv, names);
  if (e.lhs) collectThisCalls(*e.lhs, names);
  if (e.rhs) collectThisCalls(*e.rhs, names);
  for (const auto& a : e.args) collectThisCalls(*a, names);
}

inline void collectThisCalls(const std::vector<Stmt>& body, std::vector<std::string>& names) {
  for (const auto& s : body) {
    if (s.receiver) collectThisCalls(*s.receiver, names);
    if (s.expr) collectThisCalls(*s.expr, names);
    collectThisCalls(s.thenBody, names);
    collectThisCalls(s.elseBody, names);
  }
}

// Impure: assigns a field of `this` directly, or calls an own method that
// does (one level deep).
inline bool isImpure(const ClassDef& cls, const MethodDef& m) {
  if (m.isStatic) return false;
  if (assignsOwnField(m.body)) return true;
  std::vector<std::string> callees;
  collectThisCalls(m.body, callees);
  for (const auto& name : callees)
    for (const auto& other : cls.methods)
      if (other.name == name && assignsOwnField(other.body)) return true;
  return false;
}

inline bool isFactory(const MethodDef& m) {
  return m.isStatic && m.returnType.isRef();
}

}  // namespace detail

// Builds the selection pools for one target under one mode. The target
// method must exist on the target class (resolve it first).
inline TestCluster buildCluster(const CheckedProgram& prog, const std::string& targetClass,
                                const std::string& targetMethod, ClusterMode mode) {
  TestCluster cl;
  cl.mode = mode;
  cl.targetClass = targetClass;
  cl.targetMethod = targetMethod;
  cl.prog = &prog;

  const ClassDef* cls = prog.program.findClass(targetClass);
  for (const auto& m : cls->methods)
    if (m.name == targetMethod) cl.target = &m;

  auto methodDesc = [](const ClassDef& c, const MethodDef& m) {
    return MethodDesc{c.name, m.name, m.isStatic, false, &m};
  };
  auto ctorDesc = [](const ClassDef& c) {
    return MethodDesc{c.name, "<init>", false, true, &c.constructors.front()};
  };

  cl.testMethods.push_back(methodDesc(*cls, *cl.target));
  if (mode == ClusterMode::Strict) {
    cl.generators.push_back(ctorDesc(*cls));
  } else {
    for (const auto& m : cls->methods)
      if (&m != cl.target) cl.testMethods.push_back(methodDesc(*cls, m));
    for (const auto& c : prog.program.classes) {
      cl.generators.push_back(ctorDesc(c));
      for (const auto& m : c.methods)
        if (detail::isFactory(m)) cl.generators.push_back(methodDesc(c, m));
      for (const auto& m : c.methods)
        if (detail::isImpure(c, m)) cl.modifiers.push_back(methodDesc(c, m));
    }
  }
  // Public fields are settable in every mode: the strict baseline needs
  // direct field access for classes that expose state that way.
  for (const auto& c : prog.program.classes)
    for (const auto& f : c.fields)
      if (f.isPublic) cl.fieldSetters.push_back({c.name, f.name, f.type});

  cl.intPool = {-1, 0, 1, 2, 7, 100};
  cl.strPool = prog.stringPool;
  for (const std::string& extra : {std::string(""), std::string("a")})
    if (std::find(cl.strPool.begin(), cl.strPool.end(), extra) == cl.strPool.end())
      cl.strPool.push_back(extra);
  return cl;
}

// One draw from the seeded literal pool; the pool carries one extra virtual
// slot for a random value.
inline Value randomLiteral(const TestCluster& cl, const Type& type, Rng& rng) {
  switch (type.kind) {
    case TypeKind::Int: {
      size_t idx = rng.index(cl.intPool.size() + 1);
      if (idx < cl.intPool.size()) return Value::intV(cl.intPool[idx]);
      return Value::intV(rng.intIn(-1000, 1000));
    }
    case TypeKind::Str: {
      size_t idx = rng.index(cl.strPool.size() + 1);
      if (idx < cl.strPool.size()) return Value::strV(cl.strPool[idx]);
      static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
      int len = static_cast<int>(rng.intIn(1, 5));
      std::string s;
      for (int i = 0; i < len; ++i) s += alphabet[rng.index(sizeof(alphabet) - 1)];
      return Value::strV(s);
    }
    case TypeKind::Bool:
      return Value::boolV(rng.coin());
    default:
      return Value::nullV();
  }
}

namespace detail {

// Shared machinery for insertion and repair: materializes a value of a
// needed type at a cursor position, inserting definitions when required.
class Materializer {
 public:
  Materializer(const TestCluster& cl, TestCase& test, Rng& rng)
      : cl_(cl), test_(test), rng_(rng), nextVar_(test.nextVarIndex()) {}

  // Variables of `type` defined strictly before statement index `limit`.
  std::vector<std::string> inScope(const Type& type, int limit) const {
    std::vector<std::string> out;
    for (int i = 0; i < limit && i < test_.size(); ++i) {
      const TestStatement& s = test_.statements[static_cast<size_t>(i)];
      if (s.var.empty()) continue;
      if (definedType(s) == type) out.push_back(s.var);
    }
    return out;
  }

  Type definedType(const TestStatement& s) const {
    switch (s.kind) {
      case TestStmtKind::Construct:
        return Type::refT(s.className);
      case TestStmtKind::Invoke: {
        // Receiver type is needed; scan backwards for its definition.
        for (const auto& prior : test_.statements)
          if (prior.var == s.receiver) {
            Type rt = definedType(prior);
            if (!rt.isRef()) return Type::voidT();
            const ClassDef* cls = cl_.prog->program.findClass(rt.className);
            if (!cls) return Type::voidT();
            for (const auto& m : cls->methods)
              if (m.name == s.method && m.arity() == static_cast<int>(s.args.size()) &&
                  !m.isStatic)
                return m.returnType;
            return Type::voidT();
          }
        return Type::voidT();
      }
      case TestStmtKind::StaticInvoke: {
        const ClassDef* cls = cl_.prog->program.findClass(s.className);
        if (!cls) return Type::voidT();
        for (const auto& m : cls->methods)
          if (m.name == s.method && m.arity() == static_cast<int>(s.args.size()) && m.isStatic)
            return m.returnType;
        return Type::voidT();
      }
      case TestStmtKind::SetField:
        return Type::voidT();
      case TestStmtKind::Literal:
        return detail::literalType(s.literal);
    }
    return Type::voidT();
  }

  std::string freshVar() { return "v" + std::to_string(nextVar_++); }

  // Produces an argument of `type` usable at `cursor` (which advances past
  // any inserted definitions). Fails only for Ref types with no generator.
  std::optional<TestArg> makeArg(const Type& type, int& cursor, int depth) {
    std::vector<std::string> candidates = inScope(type, cursor);
    if (!candidates.empty() && (depth >= kMaxDepth || rng_.chance(0.5)))
      return TestArg::ofVar(rng_.pick(candidates));
    if (type.isPrimitive()) return TestArg::ofLit(randomLiteral(cl_, type, rng_));
    if (type.isRef()) {
      if (rng_.chance(0.2)) return TestArg::ofLit(Value::nullV());
      std::optional<std::string> var = makeObject(type.className, cursor, depth);
      if (var) return TestArg::ofVar(*var);
      if (!candidates.empty()) return TestArg::ofVar(rng_.pick(candidates));
      return TestArg::ofLit(Value::nullV());
    }
    return std::nullopt;
  }

  // Inserts a generator call producing an instance of `className` before
  // `cursor`; returns the bound variable.
  std::optional<std::string> makeObject(const std::string& className, int& cursor, int depth) {
    if (depth >= kMaxDepth) return std::nullopt;
    std::vector<MethodDesc> gens = cl_.generatorsFor(className);
    if (gens.empty()) return std::nullopt;
    MethodDesc g = gens[rng_.index(gens.size())];
    TestStatement stmt;
    std::vector<Param> params = g.def->params;
    if (g.isCtor) {
      stmt.kind = TestStmtKind::Construct;
      stmt.className = g.className;
    } else {
      stmt.kind = TestStmtKind::StaticInvoke;
      stmt.className = g.className;
      stmt.method = g.method;
    }
    for (const auto& p : params) {
      std::optional<TestArg> arg = makeArg(p.type, cursor, depth + 1);
      if (!arg) return std::nullopt;
      stmt.args.push_back(std::move(*arg));
    }
    stmt.var = freshVar();
    test_.statements.insert(test_.statements.begin() + cursor, std::move(stmt));
    ++cursor;
    return test_.statements[static_cast<size_t>(cursor - 1)].var;
  }

  // A receiver variable of `className` available at `cursor`: reuse one or
  // construct one.
  std::optional<std::string> makeReceiver(const std::string& className, int& cursor) {
    std::vector<std::string> candidates = inScope(Type::refT(className), cursor);
    if (!candidates.empty() && rng_.chance(0.5)) return rng_.pick(candidates);
    std::optional<std::string> made = makeObject(className, cursor, 0);
    if (made) return made;
    if (!candidates.empty()) return rng_.pick(candidates);
    return std::nullopt;
  }

  // Builds the action statement for one selectable element at `cursor`.
  bool insertAction(const MethodDesc& desc, int& cursor) {
    TestStatement stmt;
    if (desc.isCtor) {
      stmt.kind = TestStmtKind::Construct;
      stmt.className = desc.className;
    } else if (desc.isStatic) {
      stmt.kind = TestStmtKind::StaticInvoke;
      stmt.className = desc.className;
      stmt.method = desc.method;
    } else {
      stmt.kind = TestStmtKind::Invoke;
      stmt.method = desc.method;
      std::optional<std::string> recv = makeReceiver(desc.className, cursor);
      if (!recv) return false;
      stmt.receiver = *recv;
    }
    for (const auto& p : desc.def->params) {
      std::optional<TestArg> arg = makeArg(p.type, cursor, 0);
      if (!arg) return false;
      stmt.args.push_back(std::move(*arg));
    }
    if (desc.isCtor || !desc.def->returnType.isVoid()) stmt.var = freshVar();
    test_.statements.insert(test_.statements.begin() + cursor, std::move(stmt));
    ++cursor;
    return true;
  }

  bool insertFieldSet(const FieldDesc& desc, int& cursor) {
    std::optional<std::string> recv = makeReceiver(desc.className, cursor);
    if (!recv) return false;
    std::optional<TestArg> value = makeArg(desc.type, cursor, 0);
    if (!value) return false;
    TestStatement stmt;
    stmt.kind = TestStmtKind::SetField;
    stmt.receiver = *recv;
    stmt.field = desc.field;
    stmt.args.push_back(std::move(*value));
    test_.statements.insert(test_.statements.begin() + cursor, std::move(stmt));
    ++cursor;
    return true;
  }

 private:
  static constexpr int kMaxDepth = 4;

  const TestCluster& cl_;
  TestCase& test_;
  Rng& rng_;
  int nextVar_;
};

struct Action {
  bool isField = false;
  MethodDesc method;
  FieldDesc field;
};

inline std::vector<Action> allActions(const TestCluster& cl) {
  std::vector<Action> actions;
  std::set<std::pair<std::string, std::string>> seen;
  auto addMethod = [&](const MethodDesc& d) {
    if (seen.insert({d.className, d.method}).second) actions.push_back({false, d, {}});
  };
  for (const auto& d : cl.testMethods) addMethod(d);
  for (const auto& d : cl.generators) addMethod(d);
  for (const auto& d : cl.modifiers) addMethod(d);
  for (const auto& f : cl.fieldSetters)
    if (seen.insert({f.className, "." + f.field}).second) actions.push_back({true, {}, f});
  return actions;
}

}  // namespace detail

// Inserts one randomly selected action (plus any statements its arguments
// need) at a random position. Returns nothing when no selectable element's
// requirements can be satisfied (SATURATED).
inline std::optional<TestCase> randomStatementInsertion(const TestCase& test,
                                                        const TestCluster& cluster, Rng& rng) {
  std::vector<detail::Action> actions = detail::allActions(cluster);
  rng.shuffle(actions);
  for (const auto& action : actions) {
    TestCase out = test;
    detail::Materializer mat(cluster, out, rng);
    int cursor = static_cast<int>(rng.index(out.size() + 1));
    bool ok = action.isField ? mat.insertFieldSet(action.field, cursor)
                             : mat.insertAction(action.method, cursor);
    if (ok) {
      rebuildVarTypes(*cluster.prog, out);
      return out;
    }
  }
  return std::nullopt;
}

// Ensures the last statement invokes the target method: truncates anything
// after the last target call, or appends one.
inline std::optional<TestCase> enforceTargetSuffix(const TestCase& test,
                                                   const TestCluster& cluster, Rng& rng) {
  TestCase out = test;
  rebuildVarTypes(*cluster.prog, out);
  int last = -1;
  for (int i = 0; i < out.size(); ++i)
    if (out.invokedMethodAt(i) == cluster.targetQualified()) last = i;
  if (last >= 0) {
    out.statements.resize(static_cast<size_t>(last) + 1);
    rebuildVarTypes(*cluster.prog, out);
    return out;
  }
  detail::Materializer mat(cluster, out, rng);
  int cursor = out.size();
  MethodDesc targetDesc{cluster.targetClass, cluster.targetMethod, cluster.target->isStatic,
                        false, cluster.target};
  if (!mat.insertAction(targetDesc, cursor)) return std::nullopt;
  rebuildVarTypes(*cluster.prog, out);
  return out;
}

// Rebinds every dangling or type-incompatible variable reference to an
// earlier in-scope variable (uniform random), or inserts a definition for
// it. Restores full type validity after crossover splicing or deletion.
// Statements may be inserted before the one under repair, so the statement
// is always re-fetched by index after a repairing call.
inline std::optional<TestCase> typeRepair(const TestCase& test, const TestCluster& cluster,
                                          Rng& rng) {
  TestCase out = test;
  detail::Materializer mat(cluster, out, rng);

  // Rebinds `var` to a value of `needed` available before statement `idx`,
  // inserting a Literal or generator chain when nothing is in scope.
  auto repairVarRef = [&](std::string& var, const Type& needed, int& idx) -> bool {
    std::vector<std::string> scope = mat.inScope(needed, idx);
    for (const auto& name : scope)
      if (name == var) return true;
    if (!scope.empty()) {
      var = rng.pick(scope);
      return true;
    }
    if (needed.isPrimitive()) {
      TestStatement lit;
      lit.kind = TestStmtKind::Literal;
      lit.literal = randomLiteral(cluster, needed, rng);
      lit.var = mat.freshVar();
      std::string name = lit.var;
      out.statements.insert(out.statements.begin() + idx, std::move(lit));
      ++idx;
      var = name;
      return true;
    }
    if (needed.isRef() && !needed.className.empty()) {
      std::optional<std::string> made = mat.makeObject(needed.className, idx, 0);
      if (!made) return false;
      var = *made;
      return true;
    }
    return false;
  };

  // Rebinds a receiver against the classes that declare the needed member.
  // Prefers keeping a valid binding, then any in-scope candidate, then a
  // fresh object of the first class a generator can produce.
  auto repairReceiver = [&](int& idx, const std::vector<std::string>& classes,
                            std::string& receiver) -> const std::string* {
    for (const auto& clsName : classes) {
      std::vector<std::string> scope = mat.inScope(Type::refT(clsName), idx);
      for (const auto& name : scope)
        if (name == receiver) return &clsName;
    }
    std::vector<std::pair<std::string, const std::string*>> candidates;
    for (const auto& clsName : classes)
      for (auto& name : mat.inScope(Type::refT(clsName), idx))
        candidates.push_back({name, &clsName});
    if (!candidates.empty()) {
      auto& chosen = candidates[rng.index(candidates.size())];
      receiver = chosen.first;
      return chosen.second;
    }
    for (const auto& clsName : classes) {
      std::optional<std::string> made = mat.makeObject(clsName, idx, 0);
      if (made) {
        receiver = *made;
        return &clsName;
      }
    }
    return nullptr;
  };

  for (int i = 0; i < out.size(); ++i) {
    std::vector<Param> params;
    Type fieldType = Type::voidT();
    bool isSetField = false;
    {
      TestStatement& s = out.statements[static_cast<size_t>(i)];
      switch (s.kind) {
        case TestStmtKind::Construct: {
          const ClassDef* cls = cluster.prog->program.findClass(s.className);
          if (!cls) return std::nullopt;
          params = cls->constructors.front().params;
          break;
        }
        case TestStmtKind::Invoke: {
          std::vector<std::string> declaring;
          for (const auto& c : cluster.prog->program.classes)
            for (const auto& m : c.methods)
              if (m.name == s.method && m.arity() == static_cast<int>(s.args.size()) &&
                  !m.isStatic)
                declaring.push_back(c.name);
          if (declaring.empty()) return std::nullopt;
          std::string receiver = s.receiver;
          int idx = i;
          const std::string* cls = repairReceiver(idx, declaring, receiver);
          if (!cls) return std::nullopt;
          std::string clsName = *cls;
          i = idx;
          TestStatement& cur = out.statements[static_cast<size_t>(i)];
          cur.receiver = receiver;
          for (const auto& m : cluster.prog->program.findClass(clsName)->methods)
            if (m.name == cur.method && m.arity() == static_cast<int>(cur.args.size()) &&
                !m.isStatic)
              params = m.params;
          break;
        }
        case TestStmtKind::StaticInvoke: {
          const ClassDef* cls = cluster.prog->program.findClass(s.className);
          if (!cls) return std::nullopt;
          bool found = false;
          for (const auto& m : cls->methods)
            if (m.name == s.method && m.arity() == static_cast<int>(s.args.size()) &&
                m.isStatic) {
              params = m.params;
              found = true;
            }
          if (!found) return std::nullopt;
          break;
        }
        case TestStmtKind::SetField: {
          isSetField = true;
          std::vector<std::string> declaring;
          for (const auto& c : cluster.prog->program.classes)
            if (const FieldDef* f = c.findField(s.field))
              if (f->isPublic) declaring.push_back(c.name);
          if (declaring.empty()) return std::nullopt;
          std::string receiver = s.receiver;
          int idx = i;
          const std::string* cls = repairReceiver(idx, declaring, receiver);
          if (!cls) return std::nullopt;
          std::string clsName = *cls;
          i = idx;
          TestStatement& cur = out.statements[static_cast<size_t>(i)];
          cur.receiver = receiver;
          fieldType = cluster.prog->program.findClass(clsName)->findField(cur.field)->type;
          break;
        }
        case TestStmtKind::Literal:
          continue;
      }
    }
    size_t nArgs = out.statements[static_cast<size_t>(i)].args.size();
    for (size_t k = 0; k < nArgs; ++k) {
      Type needed = isSetField ? fieldType : params[k].type;
      if (!out.statements[static_cast<size_t>(i)].args[k].isVar) {
        TestArg& arg = out.statements[static_cast<size_t>(i)].args[k];
        if (!detail::argAssignable(needed, arg, {}))
          arg = TestArg::ofLit(needed.isRef() ? Value::nullV()
                                              : randomLiteral(cluster, needed, rng));
        continue;
      }
      std::string var = out.statements[static_cast<size_t>(i)].args[k].var;
      int idx = i;
      if (!repairVarRef(var, needed, idx)) return std::nullopt;
      i = idx;
      out.statements[static_cast<size_t>(i)].args[k].var = var;
    }
  }
  rebuildVarTypes(*cluster.prog, out);
  return out;
}

}  // namespace modgen

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgen/typecheck.hpp"
#include "modgen/values.hpp"

namespace modgen {

enum class TestStmtKind { Construct, Invoke, StaticInvoke, SetField, Literal };

// An argument is a literal value or a reference to an earlier variable.
struct TestArg {
  bool isVar = false;
  std::string var;
  Value literal;

  static TestArg ofVar(std::string name) {
    TestArg a;
    a.isVar = true;
    a.var = std::move(name);
    return a;
  }
  static TestArg ofLit(Value v) {
    TestArg a;
    a.literal = std::move(v);
    return a;
  }

  std::string render() const { return isVar ? var : literal.str(); }
};

struct TestStatement {
  TestStmtKind kind = TestStmtKind::Literal;
  std::string var;        // defined variable; empty for void calls and SetField
  std::string className;  // Construct / StaticInvoke
  std::string method;     // Invoke / StaticInvoke
  std::string receiver;   // Invoke / SetField
  std::string field;      // SetField
  std::vector<TestArg> args;  // call arguments; SetField value is args[0]
  Value literal;          // Literal

  std::string render() const {
    std::string out;
    auto argList = [&] {
      std::string s = "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ", ";
        s += args[i].render();
      }
      s += ")";
      return s;
    };
    switch (kind) {
      case TestStmtKind::Construct:
        out = var + " := new " + className + argList();
        break;
      case TestStmtKind::Invoke:
        out = (var.empty() ? "" : var + " := ") + receiver + "." + method + argList();
        break;
      case TestStmtKind::StaticInvoke:
        out = (var.empty() ? "" : var + " := ") + className + "." + method + argList();
        break;
      case TestStmtKind::SetField:
        out = receiver + "." + field + " = " + args[0].render();
        break;
      case TestStmtKind::Literal:
        out = var + " := " + literal.str();
        break;
    }
    return out;
  }

  // Qualified name of the method this statement invokes, if any.
  std::string invokedMethod() const {
    switch (kind) {
      case TestStmtKind::Construct: return className + ".<init>";
      case TestStmtKind::Invoke: return "";  // needs receiver type; see TestCase
      case TestStmtKind::StaticInvoke: return className + "." + method;
      default: return "";
    }
  }
};

struct TestCase {
  std::vector<TestStatement> statements;
  std::map<std::string, Type> varTypes;

  int size() const { return static_cast<int>(statements.size()); }
  bool empty() const { return statements.empty(); }

  std::string render() const {
    std::string out;
    for (const auto& s : statements) {
      out += s.render();
      out += '\n';
    }
    return out;
  }

  // Qualified method invoked by statement i, or "" for SetField/Literal.
  std::string invokedMethodAt(int i) const {
    const TestStatement& s = statements[static_cast<size_t>(i)];
    if (s.kind == TestStmtKind::Invoke) {
      auto it = varTypes.find(s.receiver);
      if (it == varTypes.end()) return "";
      return it->second.className + "." + s.method;
    }
    return s.invokedMethod();
  }

  // Smallest N such that no statement defines "vN" or higher.
  int nextVarIndex() const {
    int next = 0;
    for (const auto& s : statements) {
      if (s.var.size() > 1 && s.var[0] == 'v') {
        bool digits = true;
        for (size_t i = 1; i < s.var.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(s.var[i]))) digits = false;
        if (digits) next = std::max(next, std::stoi(s.var.substr(1)) + 1);
      }
    }
    return next;
  }
};

namespace detail {

inline bool argAssignable(const Type& target, const TestArg& arg,
                          const std::map<std::string, Type>& vars) {
  if (arg.isVar) {
    auto it = vars.find(arg.var);
    return it != vars.end() && it->second == target;
  }
  switch (arg.literal.kind) {
    case ValueKind::Int: return target.kind == TypeKind::Int;
    case ValueKind::Bool: return target.kind == TypeKind::Bool;
    case ValueKind::Str: return target.kind == TypeKind::Str;
    case ValueKind::Null: return target.isRef();
    case ValueKind::ObjRef: return false;  // heap ids are not test-case values
  }
  return false;
}

inline Type literalType(const Value& v) {
  switch (v.kind) {
    case ValueKind::Int: return Type::intT();
    case ValueKind::Bool: return Type::boolT();
    case ValueKind::Str: return Type::strT();
    default: return Type::voidT();
  }
}

}  // namespace detail

// Structural validity of a test against a program: every referenced variable
// is defined earlier with the exact needed type, no variable is defined
// twice, calls resolve, SetField only touches public fields. Returns one
// message per violation; empty means valid.
inline std::vector<std::string> validateTest(const CheckedProgram& prog, const TestCase& test) {
  std::vector<std::string> errors;
  std::map<std::string, Type> vars;
  auto err = [&](int i, const std::string& msg) {
    errors.push_back("statement " + std::to_string(i) + ": " + msg);
  };
  auto define = [&](int i, const std::string& var, Type t) {
    if (var.empty()) return;
    if (vars.count(var)) err(i, "variable " + var + " defined twice");
    vars[var] = t;
  };
  auto checkArgs = [&](int i, const std::vector<Param>& params,
                       const std::vector<TestArg>& args, const std::string& what) {
    if (params.size() != args.size()) {
      err(i, what + ": expected " + std::to_string(params.size()) + " arguments, got " +
                 std::to_string(args.size()));
      return;
    }
    for (size_t k = 0; k < args.size(); ++k)
      if (!detail::argAssignable(params[k].type, args[k], vars))
        err(i, what + ": argument " + std::to_string(k + 1) + " has the wrong type");
  };

  for (int i = 0; i < test.size(); ++i) {
    const TestStatement& s = test.statements[static_cast<size_t>(i)];
    switch (s.kind) {
      case TestStmtKind::Construct: {
        const ClassDef* cls = prog.program.findClass(s.className);
        if (!cls) {
          err(i, "unknown class " + s.className);
          break;
        }
        checkArgs(i, cls->constructors.front().params, s.args, "new " + s.className);
        if (s.var.empty()) err(i, "construct must bind a variable");
        define(i, s.var, Type::refT(s.className));
        break;
      }
      case TestStmtKind::Invoke: {
        auto it = vars.find(s.receiver);
        if (it == vars.end() || !it->second.isRef()) {
          err(i, "receiver " + s.receiver + " is not a defined object variable");
          break;
        }
        const ClassDef* cls = prog.program.findClass(it->second.className);
        const MethodDef* m = nullptr;
        for (const auto& cand : cls->methods)
          if (cand.name == s.method && cand.arity() == static_cast<int>(s.args.size()) &&
              !cand.isStatic)
            m = &cand;
        if (!m) {
          err(i, "unknown method " + s.method + "/" + std::to_string(s.args.size()) +
                     " on " + it->second.className);
          break;
        }
        checkArgs(i, m->params, s.args, s.method);
        if (m->returnType.isVoid()) {
          if (!s.var.empty()) err(i, "void call cannot bind a variable");
        } else {
          if (s.var.empty()) err(i, "non-void call must bind a variable");
          define(i, s.var, m->returnType);
        }
        break;
      }
      case TestStmtKind::StaticInvoke: {
        const ClassDef* cls = prog.program.findClass(s.className);
        if (!cls) {
          err(i, "unknown class " + s.className);
          break;
        }
        const MethodDef* m = nullptr;
        for (const auto& cand : cls->methods)
          if (cand.name == s.method && cand.arity() == static_cast<int>(s.args.size()) &&
              cand.isStatic)
            m = &cand;
        if (!m) {
          err(i, "unknown static method " + s.method + "/" + std::to_string(s.args.size()) +
                     " on " + s.className);
          break;
        }
        checkArgs(i, m->params, s.args, s.method);
        if (m->returnType.isVoid()) {
          if (!s.var.empty()) err(i, "void call cannot bind a variable");
        } else {
          if (s.var.empty()) err(i, "non-void call must bind a variable");
          define(i, s.var, m->returnType);
        }
        break;
      }
      case TestStmtKind::SetField: {
        auto it = vars.find(s.receiver);
        if (it == vars.end() || !it->second.isRef()) {
          err(i, "receiver " + s.receiver + " is not a defined object variable");
          break;
        }
        const ClassDef* cls = prog.program.findClass(it->second.className);
        const FieldDef* f = cls->findField(s.field);
        if (!f) {
          err(i, "class " + it->second.className + " has no field " + s.field);
          break;
        }
        if (!f->isPublic) err(i, "field " + s.field + " is private");
        if (s.args.size() != 1 || !detail::argAssignable(f->type, s.args[0], vars))
          err(i, "field " + s.field + " assigned a value of the wrong type");
        break;
      }
      case TestStmtKind::Literal: {
        Type t = detail::literalType(s.literal);
        if (t.isVoid()) {
          err(i, "literal statements must bind int, bool, or str");
          break;
        }
        if (s.var.empty()) err(i, "literal must bind a variable");
        define(i, s.var, t);
        break;
      }
    }
  }
  return errors;
}

// Recomputes varTypes from the statements. Call after any structural edit;
// assumes the statements are valid (validateTest reports problems).
inline void rebuildVarTypes(const CheckedProgram& prog, TestCase& test) {
  test.varTypes.clear();
  for (const auto& s : test.statements) {
    if (s.var.empty()) continue;
    switch (s.kind) {
      case TestStmtKind::Construct:
        test.varTypes[s.var] = Type::refT(s.className);
        break;
      case TestStmtKind::Invoke: {
        auto it = test.varTypes.find(s.receiver);
        if (it == test.varTypes.end() || !it->second.isRef()) break;
        const ClassDef* cls = prog.program.findClass(it->second.className);
        if (!cls) break;
        for (const auto& m : cls->methods)
          if (m.name == s.method && m.arity() == static_cast<int>(s.args.size()) && !m.isStatic)
            test.varTypes[s.var] = m.returnType;
        break;
      }
      case TestStmtKind::StaticInvoke: {
        const ClassDef* cls = prog.program.findClass(s.className);
        if (!cls) break;
        for (const auto& m : cls->methods)
          if (m.name == s.method && m.arity() == static_cast<int>(s.args.size()) && m.isStatic)
            test.varTypes[s.var] = m.returnType;
        break;
      }
      case TestStmtKind::SetField:
        break;
      case TestStmtKind::Literal:
        test.varTypes[s.var] = detail::literalType(s.literal);
        break;
    }
  }
}

}  // namespace modgen

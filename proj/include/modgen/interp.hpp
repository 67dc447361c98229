#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "modgen/testcase.hpp"
#include "modgen/trace.hpp"
#include "modgen/typecheck.hpp"
#include "modgen/values.hpp"

namespace modgen {

struct ExecLimits {
  long long stepLimit = 100000;
  int callDepthLimit = 256;  // hit reported as STEP_LIMIT, see run loop
};

// Simultaneous truth value and both arm distances for one predicate
// evaluation. Operands are evaluated exactly once; `&&` and `||` evaluate
// both sides so each operand's distance is always defined.
struct PredEval {
  bool value = false;
  double distTrue = 0.0;
  double distFalse = 0.0;
};

// Result of a detailed execution: trace plus the final test-variable
// bindings and heap, for state inspection in tests and oracles.
struct ExecResult {
  ExecutionTrace trace;
  std::map<std::string, Value> vars;
  ObjectHeap heap;
};

class Interpreter {
 public:
  explicit Interpreter(const CheckedProgram& prog, ExecLimits limits = {})
      : prog_(prog), limits_(limits) {}

  ExecutionTrace run(const TestCase& test) { return runDetailed(test).trace; }

  ExecResult runDetailed(const TestCase& test) {
    reset();
    ExecResult res;
    for (int i = 0; i < test.size(); ++i) {
      const TestStatement& s = test.statements[static_cast<size_t>(i)];
      root_ = test.invokedMethodAt(i);
      try {
        execTestStatement(s);
      } catch (const Fault& f) {
        trace_.outcome = TraceOutcome::RuntimeFault;
        trace_.fault = f.kind;
        trace_.faultPos = f.pos;
        break;
      } catch (const Exhausted&) {
        trace_.outcome = TraceOutcome::StepLimit;
        break;
      }
    }
    trace_.steps = steps_;
    res.trace = std::move(trace_);
    res.vars = std::move(vars_);
    res.heap = std::move(heap_);
    return res;
  }

  // Evaluates one typechecked Bool predicate under explicit bindings (the
  // map may bind "this" to an object reference). No event is recorded.
  PredEval evalPredicate(const Expr& predicate, const std::map<std::string, Value>& bindings) {
    reset();
    Frame f;
    f.method = nullptr;
    f.slots = bindings;
    auto thisIt = bindings.find("this");
    if (thisIt != bindings.end()) f.thisV = thisIt->second;
    return evalPred(predicate, f);
  }

  ObjectHeap& heap() { return heap_; }

 private:
  struct Fault {
    FaultKind kind;
    SrcPos pos;
  };
  struct Exhausted {};
  enum class Flow { Normal, Returned };

  struct Frame {
    const MethodDef* method = nullptr;
    Value thisV;
    std::map<std::string, Value> slots;
  };

  static constexpr double kK = 1.0;  // flip constant of the distance rules

  void reset() {
    trace_ = {};
    vars_.clear();
    heap_ = {};
    steps_ = 0;
    depth_ = 0;
    root_.clear();
  }

  void execTestStatement(const TestStatement& s) {
    switch (s.kind) {
      case TestStmtKind::Construct: {
        const ClassDef* cls = prog_.program.findClass(s.className);
        vars_[s.var] = construct(*cls, evalArgs(s.args));
        return;
      }
      case TestStmtKind::Invoke: {
        Value recv = vars_[s.receiver];
        if (recv.isNull()) throw Fault{FaultKind::NullDeref, {}};
        const ClassDef& cls = *prog_.program.findClass(heap_.at(recv.heapId).className);
        const MethodDef& m = *findMethod(cls, s.method, s.args.size(), false);
        Value ret = callMethod(m, recv, evalArgs(s.args));
        if (!s.var.empty()) vars_[s.var] = ret;
        return;
      }
      case TestStmtKind::StaticInvoke: {
        const ClassDef& cls = *prog_.program.findClass(s.className);
        const MethodDef& m = *findMethod(cls, s.method, s.args.size(), true);
        Value ret = callMethod(m, Value::nullV(), evalArgs(s.args));
        if (!s.var.empty()) vars_[s.var] = ret;
        return;
      }
      case TestStmtKind::SetField: {
        Value recv = vars_[s.receiver];
        if (recv.isNull()) throw Fault{FaultKind::NullDeref, {}};
        heap_.at(recv.heapId).fields[s.field] = argValue(s.args[0]);
        return;
      }
      case TestStmtKind::Literal:
        vars_[s.var] = s.literal;
        return;
    }
  }

  std::vector<Value> evalArgs(const std::vector<TestArg>& args) {
    std::vector<Value> vals;
    vals.reserve(args.size());
    for (const auto& a : args) vals.push_back(argValue(a));
    return vals;
  }

  Value argValue(const TestArg& a) { return a.isVar ? vars_[a.var] : a.literal; }

  static const MethodDef* findMethod(const ClassDef& cls, const std::string& name,
                                     size_t arity, bool isStatic) {
    for (const auto& m : cls.methods)
      if (m.name == name && m.arity() == static_cast<int>(arity) && m.isStatic == isStatic)
        return &m;
    return nullptr;
  }

  Value construct(const ClassDef& cls, std::vector<Value> args) {
    int id = heap_.allocate(cls);
    callMethod(cls.constructors.front(), Value::refV(id), std::move(args));
    return Value::refV(id);
  }

  Value callMethod(const MethodDef& m, Value thisV, std::vector<Value> args) {
    if (++depth_ > limits_.callDepthLimit) throw Exhausted{};
    Frame f;
    f.method = &m;
    f.thisV = thisV;
    for (size_t i = 0; i < m.params.size(); ++i) f.slots[m.params[i].name] = args[i];
    for (const auto& local : m.locals) f.slots[local.name] = Value::defaultFor(local.type);
    Value ret = Value::nullV();
    Flow flow = execBlock(m.body, f, ret);
    --depth_;
    if (flow == Flow::Returned) return ret;
    return m.returnType.isVoid() ? Value::nullV() : Value::defaultFor(m.returnType);
  }

  Flow execBlock(const std::vector<Stmt>& body, Frame& f, Value& ret) {
    for (const auto& s : body)
      if (execStmt(s, f, ret) == Flow::Returned) return Flow::Returned;
    return Flow::Normal;
  }

  Flow execStmt(const Stmt& s, Frame& f, Value& ret) {
    step();
    switch (s.kind) {
      case StmtKind::Assign:
        f.slots[s.name] = eval(*s.expr, f);
        return Flow::Normal;
      case StmtKind::FieldAssign: {
        Value recv = eval(*s.receiver, f);
        if (recv.isNull()) throw Fault{FaultKind::NullDeref, s.pos};
        Value v = eval(*s.expr, f);
        heap_.at(recv.heapId).fields[s.name] = v;
        return Flow::Normal;
      }
      case StmtKind::If: {
        bool taken = checkPredicate(s, f);
        return execBlock(taken ? s.thenBody : s.elseBody, f, ret);
      }
      case StmtKind::While:
        while (true) {
          bool taken = checkPredicate(s, f);
          if (!taken) return Flow::Normal;
          if (execBlock(s.thenBody, f, ret) == Flow::Returned) return Flow::Returned;
          step();  // each re-check of the loop predicate is a step
        }
      case StmtKind::Return:
        if (s.expr) ret = eval(*s.expr, f);
        return Flow::Returned;
      case StmtKind::ExprStmt:
        eval(*s.expr, f);
        return Flow::Normal;
    }
    return Flow::Normal;
  }

  bool checkPredicate(const Stmt& s, Frame& f) {
    PredEval pe = evalPred(*s.expr, f);
    BranchEvent ev;
    ev.goalTaken = {f.method->qualifiedName(), s.predicateIndex,
                    pe.value ? Arm::True : Arm::False};
    ev.oppositeDistance = pe.value ? pe.distFalse : pe.distTrue;
    ev.rootMethod = root_;
    ev.stepIndex = steps_;
    trace_.events.push_back(ev);
    return pe.value;
  }

  PredEval evalPred(const Expr& e, Frame& f) {
    if (e.kind == ExprKind::BinOp) {
      switch (e.binOp) {
        case BinOpKind::And: {
          PredEval a = evalPred(*e.lhs, f);
          PredEval b = evalPred(*e.rhs, f);
          return {a.value && b.value, a.distTrue + b.distTrue,
                  std::min(a.distFalse, b.distFalse)};
        }
        case BinOpKind::Or: {
          PredEval a = evalPred(*e.lhs, f);
          PredEval b = evalPred(*e.rhs, f);
          return {a.value || b.value, std::min(a.distTrue, b.distTrue),
                  a.distFalse + b.distFalse};
        }
        case BinOpKind::Eq:
        case BinOpKind::Ne: {
          Value va = eval(*e.lhs, f);
          Value vb = eval(*e.rhs, f);
          PredEval eq;
          if (e.lhs->type.kind == TypeKind::Int) {
            double d = std::fabs(static_cast<double>(va.i) - static_cast<double>(vb.i));
            eq.value = d == 0.0;
            eq.distTrue = eq.value ? 0.0 : d + kK;
            eq.distFalse = eq.value ? kK : 0.0;
          } else {
            // Bool, Str, and reference equality: flat flip distance.
            eq.value = va == vb;
            eq.distTrue = eq.value ? 0.0 : kK;
            eq.distFalse = eq.value ? kK : 0.0;
          }
          if (e.binOp == BinOpKind::Eq) return eq;
          return {!eq.value, eq.distFalse, eq.distTrue};
        }
        case BinOpKind::Lt: {
          double a = static_cast<double>(eval(*e.lhs, f).i);
          double b = static_cast<double>(eval(*e.rhs, f).i);
          bool v = a < b;
          return {v, v ? 0.0 : a - b + kK, v ? b - a + kK : 0.0};
        }
        case BinOpKind::Le: {
          double a = static_cast<double>(eval(*e.lhs, f).i);
          double b = static_cast<double>(eval(*e.rhs, f).i);
          bool v = a <= b;
          return {v, v ? 0.0 : a - b + kK, v ? b - a + kK : 0.0};
        }
        default:
          break;  // arithmetic never types as Bool
      }
    }
    // Boolean atom: variable, field, call, contains(...), literal.
    bool v = eval(e, f).b;
    return {v, v ? 0.0 : kK, v ? kK : 0.0};
  }

  Value eval(const Expr& e, Frame& f) {
    switch (e.kind) {
      case ExprKind::IntLit: return Value::intV(e.intValue);
      case ExprKind::BoolLit: return Value::boolV(e.boolValue);
      case ExprKind::StrLit: return Value::strV(e.strValue);
      case ExprKind::NullLit: return Value::nullV();
      case ExprKind::VarRef: return f.slots[e.name];
      case ExprKind::ThisRef: return f.thisV;
      case ExprKind::FieldRead: {
        Value recv = eval(*e.recv, f);
        if (recv.isNull()) throw Fault{FaultKind::NullDeref, e.pos};
        return heap_.at(recv.heapId).fields[e.name];
      }
      case ExprKind::BinOp:
        switch (e.binOp) {
          case BinOpKind::Add: return Value::intV(eval(*e.lhs, f).i + eval(*e.rhs, f).i);
          case BinOpKind::Sub: return Value::intV(eval(*e.lhs, f).i - eval(*e.rhs, f).i);
          case BinOpKind::Mul: return Value::intV(eval(*e.lhs, f).i * eval(*e.rhs, f).i);
          default: return Value::boolV(evalPred(e, f).value);
        }
      case ExprKind::StrOp: {
        Value recv = eval(*e.recv, f);
        return evalStrOp(e, recv.s, f);
      }
      case ExprKind::Call: {
        Value recv = eval(*e.recv, f);
        if (recv.isNull()) throw Fault{FaultKind::NullDeref, e.pos};
        const ClassDef& cls = *prog_.program.findClass(heap_.at(recv.heapId).className);
        const MethodDef& m = *findMethod(cls, e.name, e.args.size(), false);
        return callMethod(m, recv, evalCallArgs(e, f));
      }
      case ExprKind::StaticCall: {
        const ClassDef& cls = *prog_.program.findClass(e.className);
        const MethodDef& m = *findMethod(cls, e.name, e.args.size(), true);
        return callMethod(m, Value::nullV(), evalCallArgs(e, f));
      }
      case ExprKind::New: {
        const ClassDef& cls = *prog_.program.findClass(e.className);
        return construct(cls, evalCallArgs(e, f));
      }
    }
    return Value::nullV();
  }

  std::vector<Value> evalCallArgs(const Expr& e, Frame& f) {
    std::vector<Value> vals;
    vals.reserve(e.args.size());
    for (const auto& a : e.args) vals.push_back(eval(*a, f));
    return vals;
  }

  Value evalStrOp(const Expr& e, const std::string& s, Frame& f) {
    switch (e.strOp) {
      case StrOpKind::Length:
        return Value::intV(static_cast<long long>(s.size()));
      case StrOpKind::Contains:
        return Value::boolV(s.find(eval(*e.args[0], f).s) != std::string::npos);
      case StrOpKind::IndexOf: {
        size_t pos = s.find(eval(*e.args[0], f).s);
        return Value::intV(pos == std::string::npos ? -1 : static_cast<long long>(pos));
      }
      case StrOpKind::Concat:
        return Value::strV(s + eval(*e.args[0], f).s);
      case StrOpKind::CharAt: {
        long long i = eval(*e.args[0], f).i;
        if (i < 0 || i >= static_cast<long long>(s.size()))
          throw Fault{FaultKind::IndexOutOfRange, e.pos};
        return Value::strV(std::string(1, s[static_cast<size_t>(i)]));
      }
      case StrOpKind::Substring: {
        long long a = eval(*e.args[0], f).i;
        long long b = eval(*e.args[1], f).i;
        if (a < 0 || b < a || b > static_cast<long long>(s.size()))
          throw Fault{FaultKind::IndexOutOfRange, e.pos};
        return Value::strV(s.substr(static_cast<size_t>(a), static_cast<size_t>(b - a)));
      }
    }
    return Value::nullV();
  }

  void step() {
    if (++steps_ > limits_.stepLimit) throw Exhausted{};
  }

  const CheckedProgram& prog_;
  ExecLimits limits_;
  ExecutionTrace trace_;
  std::map<std::string, Value> vars_;
  ObjectHeap heap_;
  long long steps_ = 0;
  int depth_ = 0;
  std::string root_;
};

inline ExecutionTrace executeTest(const CheckedProgram& prog, const TestCase& test,
                                  ExecLimits limits = {}) {
  return Interpreter(prog, limits).run(test);
}

inline ExecResult executeTestDetailed(const CheckedProgram& prog, const TestCase& test,
                                      ExecLimits limits = {}) {
  return Interpreter(prog, limits).runDetailed(test);
}

// (taken arm, raw distance to the opposite arm) for one predicate under
// explicit bindings.
inline std::pair<Arm, double> branchDistance(const CheckedProgram& prog, const Expr& predicate,
                                             const std::map<std::string, Value>& bindings) {
  Interpreter interp(prog);
  PredEval pe = interp.evalPredicate(predicate, bindings);
  return {pe.value ? Arm::True : Arm::False, pe.value ? pe.distFalse : pe.distTrue};
}

}  // namespace modgen

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgen/ast.hpp"
#include "modgen/parser.hpp"

namespace modgen {

// A typechecked program. Every expression carries its type, bare identifiers
// are resolved (field reads become explicit `this` accesses), string method
// calls are rewritten to StrOp nodes, calls through a class name become
// StaticCall nodes, and each method has its branch goals and local slots
// recorded. `stringPool` holds every distinct string literal in source order.
struct CheckedProgram {
  Program program;
  std::vector<std::string> stringPool;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

inline std::vector<BranchGoalId> enumerateBranchGoals(const MethodDef& m) {
  return m.branchGoals;
}

inline std::vector<BranchGoalId> enumerateBranchGoals(const Program& p) {
  std::vector<BranchGoalId> out;
  for (const auto& cls : p.classes) {
    for (const auto& c : cls.constructors)
      out.insert(out.end(), c.branchGoals.begin(), c.branchGoals.end());
    for (const auto& m : cls.methods)
      out.insert(out.end(), m.branchGoals.begin(), m.branchGoals.end());
  }
  return out;
}

class Typechecker {
 public:
  explicit Typechecker(Program program) { checked_.program = std::move(program); }

  CheckedProgram run() {
    buildClassTable();
    for (auto& cls : checked_.program.classes) {
      for (auto& ctor : cls.constructors) checkMethod(cls, ctor);
      for (auto& m : cls.methods) checkMethod(cls, m);
    }
    return std::move(checked_);
  }

 private:
  struct Bail {};

  void buildClassTable() {
    for (auto& cls : checked_.program.classes) {
      if (classes_.count(cls.name))
        report(cls.pos, "duplicate class " + cls.name);
      classes_[cls.name] = &cls;
    }
    for (auto& cls : checked_.program.classes) {
      std::set<std::string> fieldNames;
      for (const auto& f : cls.fields) {
        if (!fieldNames.insert(f.name).second)
          report(f.pos, "duplicate field " + f.name + " in class " + cls.name);
        if (f.type.isRef() && !classes_.count(f.type.className))
          report(f.pos, "unknown class " + f.type.className);
      }
      std::set<std::string> methodNames;
      for (const auto& m : cls.methods) {
        if (!methodNames.insert(m.name).second)
          report(m.pos, "duplicate method " + m.name + " in class " + cls.name);
      }
      if (cls.constructors.size() > 1)
        report(cls.pos, "class " + cls.name + " has more than one constructor");
    }
  }

  void checkMethod(ClassDef& cls, MethodDef& m) {
    curClass_ = &cls;
    curMethod_ = &m;
    locals_.clear();
    params_.clear();
    m.locals.clear();
    try {
      for (const auto& p : m.params) {
        if (p.type.isRef() && !classes_.count(p.type.className))
          fail(p.pos, "unknown class " + p.type.className);
        if (params_.count(p.name) )
          fail(p.pos, "duplicate parameter " + p.name);
        params_[p.name] = p.type;
      }
      if (m.returnType.isRef() && !classes_.count(m.returnType.className))
        fail(m.pos, "unknown class " + m.returnType.className);
      checkBlock(m.body);
    } catch (const Bail&) {
      // Diagnostic already recorded; move on to the next method.
    }
    int next = 0;
    numberPredicates(m.body, next);
    m.branchGoals.clear();
    for (int i = 0; i < next; ++i) {
      m.branchGoals.push_back({m.qualifiedName(), i, Arm::True});
      m.branchGoals.push_back({m.qualifiedName(), i, Arm::False});
    }
  }

  static void numberPredicates(std::vector<Stmt>& body, int& next) {
    for (auto& s : body) {
      if (s.kind == StmtKind::If || s.kind == StmtKind::While) {
        s.predicateIndex = next++;
        numberPredicates(s.thenBody, next);
        numberPredicates(s.elseBody, next);
      }
    }
  }

  void checkBlock(std::vector<Stmt>& body) {
    for (auto& s : body) checkStmt(s);
  }

  void checkStmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: {
        Type rhs = checkExpr(s.expr);
        auto localIt = locals_.find(s.name);
        if (localIt != locals_.end()) {
          requireAssignable(localIt->second, rhs, s.pos, "variable " + s.name);
          return;
        }
        auto paramIt = params_.find(s.name);
        if (paramIt != params_.end()) {
          requireAssignable(paramIt->second, rhs, s.pos, "parameter " + s.name);
          return;
        }
        if (!curMethod_->isStatic) {
          if (const FieldDef* f = curClass_->findField(s.name)) {
            requireAssignable(f->type, rhs, s.pos, "field " + s.name);
            s.kind = StmtKind::FieldAssign;
            s.receiver = makeExpr(ExprKind::ThisRef, s.pos);
            s.receiver->type = Type::refT(curClass_->name);
            return;
          }
        }
        if (rhs.isVoid()) fail(s.pos, "cannot assign a void expression");
        if (isNullType(rhs)) fail(s.pos, "cannot infer a type for " + s.name + " from null");
        locals_[s.name] = rhs;
        curMethod_->locals.push_back({s.name, rhs, s.pos});
        return;
      }
      case StmtKind::FieldAssign: {
        Type recv = checkExpr(s.receiver);
        const FieldDef* f = resolveField(recv, s.name, s.pos);
        checkFieldAccess(recv, *f, s.pos);
        Type rhs = checkExpr(s.expr);
        requireAssignable(f->type, rhs, s.pos, "field " + s.name);
        return;
      }
      case StmtKind::If:
      case StmtKind::While: {
        Type cond = checkExpr(s.expr);
        if (cond.kind != TypeKind::Bool) fail(s.expr->pos, "predicate must be Bool");
        checkBlock(s.thenBody);
        checkBlock(s.elseBody);
        return;
      }
      case StmtKind::Return: {
        if (!s.expr) {
          if (!curMethod_->returnType.isVoid() && !curMethod_->isCtor)
            fail(s.pos, "method " + curMethod_->name + " must return a value");
          return;
        }
        if (curMethod_->isCtor) fail(s.pos, "constructors cannot return a value");
        if (curMethod_->returnType.isVoid())
          fail(s.pos, "void method " + curMethod_->name + " cannot return a value");
        Type got = checkExpr(s.expr);
        requireAssignable(curMethod_->returnType, got, s.pos, "return value");
        return;
      }
      case StmtKind::ExprStmt:
        checkExpr(s.expr);
        return;
    }
  }

  Type checkExpr(ExprPtr& e) {
    Type t = checkExprInner(e);
    e->type = t;
    return t;
  }

  Type checkExprInner(ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit:
        return Type::intT();
      case ExprKind::BoolLit:
        return Type::boolT();
      case ExprKind::StrLit:
        harvest(e->strValue);
        return Type::strT();
      case ExprKind::NullLit:
        return nullType();
      case ExprKind::ThisRef:
        if (curMethod_->isStatic) fail(e->pos, "'this' is not available in a static method");
        return Type::refT(curClass_->name);
      case ExprKind::VarRef: {
        auto localIt = locals_.find(e->name);
        if (localIt != locals_.end()) return localIt->second;
        auto paramIt = params_.find(e->name);
        if (paramIt != params_.end()) return paramIt->second;
        if (!curMethod_->isStatic) {
          if (const FieldDef* f = curClass_->findField(e->name)) {
            e->kind = ExprKind::FieldRead;
            e->recv = makeExpr(ExprKind::ThisRef, e->pos);
            e->recv->type = Type::refT(curClass_->name);
            return f->type;
          }
        }
        fail(e->pos, "unknown identifier " + e->name);
      }
      case ExprKind::FieldRead: {
        Type recv = checkExpr(e->recv);
        const FieldDef* f = resolveField(recv, e->name, e->pos);
        checkFieldAccess(recv, *f, e->pos);
        return f->type;
      }
      case ExprKind::BinOp:
        return checkBinOp(e);
      case ExprKind::Call:
        return checkCall(e);
      case ExprKind::StaticCall:
      case ExprKind::StrOp:
        fail(e->pos, "internal: node already resolved");
      case ExprKind::New: {
        auto it = classes_.find(e->className);
        if (it == classes_.end()) fail(e->pos, "unknown class " + e->className);
        const MethodDef& ctor = it->second->constructors.front();
        checkArgs(ctor, e->args, e->pos);
        return Type::refT(e->className);
      }
    }
    fail(e->pos, "internal: unhandled expression");
  }

  Type checkBinOp(ExprPtr& e) {
    Type lhs = checkExpr(e->lhs);
    Type rhs = checkExpr(e->rhs);
    switch (e->binOp) {
      case BinOpKind::Add:
      case BinOpKind::Sub:
      case BinOpKind::Mul:
        if (lhs.kind != TypeKind::Int || rhs.kind != TypeKind::Int)
          fail(e->pos, "arithmetic requires Int operands");
        return Type::intT();
      case BinOpKind::Lt:
      case BinOpKind::Le:
        if (lhs.kind != TypeKind::Int || rhs.kind != TypeKind::Int)
          fail(e->pos, "comparison requires Int operands");
        return Type::boolT();
      case BinOpKind::Eq:
      case BinOpKind::Ne:
        if (!comparable(lhs, rhs))
          fail(e->pos, "cannot compare " + lhs.str() + " with " + rhs.str());
        return Type::boolT();
      case BinOpKind::And:
      case BinOpKind::Or:
        if (lhs.kind != TypeKind::Bool || rhs.kind != TypeKind::Bool)
          fail(e->pos, "logical operator requires Bool operands");
        return Type::boolT();
    }
    fail(e->pos, "internal: unhandled operator");
  }

  Type checkCall(ExprPtr& e) {
    // A call through a bare class name is a static call, unless a variable
    // of that name shadows the class.
    if (e->recv->kind == ExprKind::VarRef && !locals_.count(e->recv->name) &&
        !params_.count(e->recv->name) && classes_.count(e->recv->name)) {
      const ClassDef* cls = classes_[e->recv->name];
      const MethodDef* m = findMethod(*cls, e->name, e->args.size());
      if (!m) fail(e->pos, "unknown method " + e->name + "/" + std::to_string(e->args.size()));
      if (!m->isStatic)
        fail(e->pos, "method " + e->name + " needs an instance of " + cls->name);
      checkArgs(*m, e->args, e->pos);
      e->kind = ExprKind::StaticCall;
      e->className = cls->name;
      e->recv = nullptr;
      return m->returnType;
    }
    Type recv = checkExpr(e->recv);
    if (recv.kind == TypeKind::Str) return checkStrOp(e);
    if (!recv.isRef() || isNullType(recv))
      fail(e->pos, "cannot call a method on " + recv.str());
    const ClassDef* cls = classes_[recv.className];
    const MethodDef* m = findMethod(*cls, e->name, e->args.size());
    if (!m) fail(e->pos, "unknown method " + e->name + "/" + std::to_string(e->args.size()));
    if (m->isStatic) fail(e->pos, "method " + e->name + " is static");
    checkArgs(*m, e->args, e->pos);
    return m->returnType;
  }

  Type checkStrOp(ExprPtr& e) {
    struct Sig {
      const char* name;
      StrOpKind op;
      std::vector<TypeKind> params;
      TypeKind ret;
    };
    static const std::vector<Sig> sigs = {
        {"length", StrOpKind::Length, {}, TypeKind::Int},
        {"contains", StrOpKind::Contains, {TypeKind::Str}, TypeKind::Bool},
        {"indexOf", StrOpKind::IndexOf, {TypeKind::Str}, TypeKind::Int},
        {"concat", StrOpKind::Concat, {TypeKind::Str}, TypeKind::Str},
        {"charAt", StrOpKind::CharAt, {TypeKind::Int}, TypeKind::Str},
        {"substring", StrOpKind::Substring, {TypeKind::Int, TypeKind::Int}, TypeKind::Str},
    };
    for (const auto& sig : sigs) {
      if (e->name != sig.name) continue;
      if (e->args.size() != sig.params.size())
        fail(e->pos, "unknown method " + e->name + "/" + std::to_string(e->args.size()));
      for (size_t i = 0; i < e->args.size(); ++i) {
        Type got = checkExpr(e->args[i]);
        if (got.kind != sig.params[i])
          fail(e->args[i]->pos, "argument " + std::to_string(i + 1) + " of " + e->name +
                                    " must be " + Type{sig.params[i], ""}.str());
      }
      e->kind = ExprKind::StrOp;
      e->strOp = sig.op;
      switch (sig.ret) {
        case TypeKind::Int: return Type::intT();
        case TypeKind::Bool: return Type::boolT();
        default: return Type::strT();
      }
    }
    fail(e->pos, "unknown method " + e->name + "/" + std::to_string(e->args.size()));
  }

  void checkArgs(const MethodDef& m, std::vector<ExprPtr>& args, SrcPos pos) {
    if (args.size() != m.params.size())
      fail(pos, "wrong number of arguments for " + m.qualifiedName() + ": expected " +
                    std::to_string(m.params.size()) + ", got " + std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i) {
      Type got = checkExpr(args[i]);
      requireAssignable(m.params[i].type, got, args[i]->pos,
                        "argument " + std::to_string(i + 1) + " of " + m.qualifiedName());
    }
  }

  const FieldDef* resolveField(Type recv, const std::string& name, SrcPos pos) {
    if (!recv.isRef() || isNullType(recv))
      fail(pos, "cannot access a field on " + recv.str());
    const ClassDef* cls = classes_[recv.className];
    const FieldDef* f = cls->findField(name);
    if (!f) fail(pos, "class " + recv.className + " has no field " + name);
    return f;
  }

  void checkFieldAccess(Type recv, const FieldDef& f, SrcPos pos) {
    if (!f.isPublic && recv.className != curClass_->name)
      fail(pos, "field " + f.name + " of class " + recv.className + " is private");
  }

  static const MethodDef* findMethod(const ClassDef& cls, const std::string& name, size_t arity) {
    for (const auto& m : cls.methods)
      if (m.name == name && m.arity() == static_cast<int>(arity)) return &m;
    return nullptr;
  }

  static Type nullType() { return Type::refT(""); }
  static bool isNullType(Type t) { return t.isRef() && t.className.empty(); }

  static bool comparable(Type a, Type b) {
    if (a.isRef() && b.isRef())
      return isNullType(a) || isNullType(b) || a.className == b.className;
    return a.kind == b.kind && !a.isVoid();
  }

  void requireAssignable(Type target, Type src, SrcPos pos, const std::string& what) {
    if (target == src) return;
    if (target.isRef() && isNullType(src)) return;
    fail(pos, what + " has type " + target.str() + " but got " + src.str());
  }

  void report(SrcPos pos, const std::string& msg) {
    checked_.diagnostics.push_back({pos, msg});
  }

  [[noreturn]] void fail(SrcPos pos, const std::string& msg) {
    report(pos, msg);
    throw Bail{};
  }

  void harvest(const std::string& s) {
    if (std::find(checked_.stringPool.begin(), checked_.stringPool.end(), s) ==
        checked_.stringPool.end())
      checked_.stringPool.push_back(s);
  }

  CheckedProgram checked_;
  std::map<std::string, ClassDef*> classes_;
  ClassDef* curClass_ = nullptr;
  MethodDef* curMethod_ = nullptr;
  std::map<std::string, Type> locals_;
  std::map<std::string, Type> params_;
};

inline CheckedProgram typecheck(Program program) {
  return Typechecker(std::move(program)).run();
}

// Convenience front door: parse then typecheck. Parse errors surface as
// diagnostics on the result.
inline CheckedProgram analyzeProgram(const std::string& source) {
  ParseResult parsed = parseProgram(source);
  if (!parsed.ok()) {
    CheckedProgram bad;
    bad.program = std::move(parsed.program);
    bad.diagnostics = std::move(parsed.diagnostics);
    return bad;
  }
  return typecheck(std::move(parsed.program));
}

}  // namespace modgen

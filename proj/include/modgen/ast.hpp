#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

namespace modgen {

struct SrcPos {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind { Int, Bool, Str, Ref, Void };

struct Type {
  TypeKind kind = TypeKind::Void;
  std::string className;  // only for Ref

  static Type intT() { return {TypeKind::Int, {}}; }
  static Type boolT() { return {TypeKind::Bool, {}}; }
  static Type strT() { return {TypeKind::Str, {}}; }
  static Type refT(std::string name) { return {TypeKind::Ref, std::move(name)}; }
  static Type voidT() { return {TypeKind::Void, {}}; }

  bool isRef() const { return kind == TypeKind::Ref; }
  bool isVoid() const { return kind == TypeKind::Void; }
  bool isPrimitive() const {
    return kind == TypeKind::Int || kind == TypeKind::Bool || kind == TypeKind::Str;
  }

  bool operator==(const Type& o) const {
    return kind == o.kind && (kind != TypeKind::Ref || className == o.className);
  }
  bool operator!=(const Type& o) const { return !(*this == o); }
  bool operator<(const Type& o) const {
    return std::tie(kind, className) < std::tie(o.kind, o.className);
  }

  std::string str() const {
    switch (kind) {
      case TypeKind::Int: return "int";
      case TypeKind::Bool: return "bool";
      case TypeKind::Str: return "str";
      case TypeKind::Ref: return className;
      case TypeKind::Void: return "void";
    }
    return "?";
  }
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind {
  IntLit,
  BoolLit,
  StrLit,
  NullLit,
  VarRef,
  ThisRef,
  FieldRead,   // receiver in `recv`, field name in `name`
  BinOp,
  StrOp,       // receiver in `recv`, extra operands in `args`
  Call,        // instance call: receiver in `recv`, method in `name`
  StaticCall,  // class in `className`, method in `name`
  New,         // class in `className`
};

enum class BinOpKind { Add, Sub, Mul, Eq, Ne, Lt, Le, And, Or };

enum class StrOpKind { Length, Contains, IndexOf, Concat, CharAt, Substring };

struct Expr;
// Shared so parsed programs stay cheaply copyable; nodes are not mutated
// after typechecking.
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
  ExprKind kind;
  SrcPos pos;

  long long intValue = 0;
  bool boolValue = false;
  std::string strValue;   // string literal
  std::string name;       // var / field / method name
  std::string className;  // New / StaticCall

  BinOpKind binOp = BinOpKind::Add;
  StrOpKind strOp = StrOpKind::Length;

  ExprPtr recv;  // FieldRead / StrOp / Call receiver
  ExprPtr lhs;
  ExprPtr rhs;
  std::vector<ExprPtr> args;

  Type type;  // filled in by the typechecker
};

inline ExprPtr makeExpr(ExprKind kind, SrcPos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind { Assign, FieldAssign, If, While, Return, ExprStmt };

struct Stmt {
  StmtKind kind;
  SrcPos pos;

  std::string name;   // Assign target var / FieldAssign field name
  ExprPtr receiver;   // FieldAssign receiver
  ExprPtr expr;       // Assign RHS, Return value, ExprStmt expr, If/While predicate
  std::vector<Stmt> thenBody;  // If then / While body
  std::vector<Stmt> elseBody;  // If else

  // Preorder ordinal of this predicate within its method (If/While only).
  int predicateIndex = -1;
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class Arm { True, False };

inline const char* armName(Arm a) { return a == Arm::True ? "TRUE" : "FALSE"; }

struct BranchGoalId {
  std::string method;  // qualified, e.g. "Consistency.checkConsistency"
  int predicateIndex = 0;
  Arm arm = Arm::True;

  bool operator==(const BranchGoalId& o) const {
    return method == o.method && predicateIndex == o.predicateIndex && arm == o.arm;
  }
  bool operator<(const BranchGoalId& o) const {
    return std::tie(method, predicateIndex, arm) <
           std::tie(o.method, o.predicateIndex, o.arm);
  }

  std::string str() const {
    return method + "#" + std::to_string(predicateIndex) + ":" + armName(arm);
  }
};

struct Param {
  std::string name;
  Type type;
  SrcPos pos;
};

struct FieldDef {
  std::string name;
  Type type;
  bool isPublic = false;
  SrcPos pos;
};

struct MethodDef {
  std::string name;
  std::vector<Param> params;
  Type returnType = Type::voidT();
  bool isStatic = false;
  bool isCtor = false;
  std::vector<Stmt> body;
  SrcPos pos;

  // Derived by parse/typecheck.
  std::string className;
  std::vector<BranchGoalId> branchGoals;
  std::vector<Param> locals;  // implicitly declared locals, in first-assignment order

  int arity() const { return static_cast<int>(params.size()); }
  std::string qualifiedName() const {
    return className + "." + (isCtor ? "<init>" : name);
  }
};

struct ClassDef {
  std::string name;
  std::vector<FieldDef> fields;
  std::vector<MethodDef> constructors;
  std::vector<MethodDef> methods;
  SrcPos pos;

  const FieldDef* findField(const std::string& fieldName) const {
    for (const auto& f : fields)
      if (f.name == fieldName) return &f;
    return nullptr;
  }
};

struct Program {
  std::vector<ClassDef> classes;

  const ClassDef* findClass(const std::string& name) const {
    for (const auto& c : classes)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct Diagnostic {
  SrcPos pos;
  std::string message;

  // Rendered as "file:line:col: message".
  std::string render(const std::string& file) const {
    return file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col) +
           ": " + message;
  }
};

}  // namespace modgen

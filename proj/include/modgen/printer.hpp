#pragma once

#include <sstream>
#include <string>

#include "modgen/ast.hpp"

// Pretty-printer for parsed programs plus structural AST equality. Printing
// a parse result and reparsing it yields a structurally equal program: the
// printer emits the desugared forms the parser produces (no `>`, `>=` or
// `!`), and parenthesizes nested binary operands so associativity survives.

namespace modgen {

namespace detail {

inline void printStrLit(std::ostringstream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      default: out << c;
    }
  }
  out << '"';
}

inline const char* binOpToken(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Eq: return "==";
    case BinOpKind::Ne: return "!=";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Le: return "<=";
    case BinOpKind::And: return "&&";
    case BinOpKind::Or: return "||";
  }
  return "?";
}

inline const char* strOpName(StrOpKind op) {
  switch (op) {
    case StrOpKind::Length: return "length";
    case StrOpKind::Contains: return "contains";
    case StrOpKind::IndexOf: return "indexOf";
    case StrOpKind::Concat: return "concat";
    case StrOpKind::CharAt: return "charAt";
    case StrOpKind::Substring: return "substring";
  }
  return "?";
}

inline void printExpr(std::ostringstream& out, const Expr& e);

inline void printOperand(std::ostringstream& out, const Expr& e) {
  bool paren = e.kind == ExprKind::BinOp;
  if (paren) out << '(';
  printExpr(out, e);
  if (paren) out << ')';
}

inline void printArgs(std::ostringstream& out, const std::vector<ExprPtr>& args) {
  out << '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out << ", ";
    printExpr(out, *args[i]);
  }
  out << ')';
}

inline void printExpr(std::ostringstream& out, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: out << e.intValue; break;
    case ExprKind::BoolLit: out << (e.boolValue ? "true" : "false"); break;
    case ExprKind::StrLit: printStrLit(out, e.strValue); break;
    case ExprKind::NullLit: out << "null"; break;
    case ExprKind::VarRef: out << e.name; break;
    case ExprKind::ThisRef: out << "this"; break;
    case ExprKind::FieldRead:
      printOperand(out, *e.recv);
      out << '.' << e.name;
      break;
    case ExprKind::BinOp:
      printOperand(out, *e.lhs);
      out << ' ' << binOpToken(e.binOp) << ' ';
      printOperand(out, *e.rhs);
      break;
    case ExprKind::StrOp:
      printOperand(out, *e.recv);
      out << '.' << strOpName(e.strOp);
      printArgs(out, e.args);
      break;
    case ExprKind::Call:
      printOperand(out, *e.recv);
      out << '.' << e.name;
      printArgs(out, e.args);
      break;
    case ExprKind::StaticCall:
      out << e.className << '.' << e.name;
      printArgs(out, e.args);
      break;
    case ExprKind::New:
      out << "new " << e.className;
      printArgs(out, e.args);
      break;
  }
}

inline void printIndent(std::ostringstream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "  ";
}

inline void printBlock(std::ostringstream& out, const std::vector<Stmt>& body, int depth);

inline void printStmt(std::ostringstream& out, const Stmt& s, int depth) {
  printIndent(out, depth);
  switch (s.kind) {
    case StmtKind::Assign:
      out << s.name << " = ";
      printExpr(out, *s.expr);
      out << ";\n";
      break;
    case StmtKind::FieldAssign:
      printOperand(out, *s.receiver);
      out << '.' << s.name << " = ";
      printExpr(out, *s.expr);
      out << ";\n";
      break;
    case StmtKind::If:
      out << "if (";
      printExpr(out, *s.expr);
      out << ") {\n";
      printBlock(out, s.thenBody, depth + 1);
      printIndent(out, depth);
      out << '}';
      if (!s.elseBody.empty()) {
        out << " else {\n";
        printBlock(out, s.elseBody, depth + 1);
        printIndent(out, depth);
        out << '}';
      }
      out << '\n';
      break;
    case StmtKind::While:
      out << "while (";
      printExpr(out, *s.expr);
      out << ") {\n";
      printBlock(out, s.thenBody, depth + 1);
      printIndent(out, depth);
      out << "}\n";
      break;
    case StmtKind::Return:
      out << "return";
      if (s.expr) {
        out << ' ';
        printExpr(out, *s.expr);
      }
      out << ";\n";
      break;
    case StmtKind::ExprStmt:
      printExpr(out, *s.expr);
      out << ";\n";
      break;
  }
}

inline void printBlock(std::ostringstream& out, const std::vector<Stmt>& body, int depth) {
  for (const auto& s : body) printStmt(out, s, depth);
}

inline void printParams(std::ostringstream& out, const std::vector<Param>& params) {
  out << '(';
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out << ", ";
    out << params[i].type.str() << ' ' << params[i].name;
  }
  out << ')';
}

}  // namespace detail

inline std::string prettyPrint(const Program& prog) {
  std::ostringstream out;
  bool firstClass = true;
  for (const auto& cls : prog.classes) {
    if (!firstClass) out << '\n';
    firstClass = false;
    out << "class " << cls.name << " {\n";
    for (const auto& f : cls.fields) {
      detail::printIndent(out, 1);
      out << (f.isPublic ? "public " : "private ") << f.type.str() << ' ' << f.name
          << ";\n";
    }
    for (const auto& c : cls.constructors) {
      detail::printIndent(out, 1);
      out << cls.name;
      detail::printParams(out, c.params);
      out << " {\n";
      detail::printBlock(out, c.body, 2);
      detail::printIndent(out, 1);
      out << "}\n";
    }
    for (const auto& m : cls.methods) {
      detail::printIndent(out, 1);
      if (m.isStatic) out << "static ";
      out << m.returnType.str() << ' ' << m.name;
      detail::printParams(out, m.params);
      out << " {\n";
      detail::printBlock(out, m.body, 2);
      detail::printIndent(out, 1);
      out << "}\n";
    }
    out << "}\n";
  }
  return out.str();
}

// Structural equality, ignoring source positions and typecheck annotations.

inline bool equalExprs(const ExprPtr& a, const ExprPtr& b);

inline bool equalExprLists(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!equalExprs(a[i], b[i])) return false;
  return true;
}

inline bool equalExprs(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit: return a->intValue == b->intValue;
    case ExprKind::BoolLit: return a->boolValue == b->boolValue;
    case ExprKind::StrLit: return a->strValue == b->strValue;
    case ExprKind::NullLit:
    case ExprKind::ThisRef: return true;
    case ExprKind::VarRef: return a->name == b->name;
    case ExprKind::FieldRead:
      return a->name == b->name && equalExprs(a->recv, b->recv);
    case ExprKind::BinOp:
      return a->binOp == b->binOp && equalExprs(a->lhs, b->lhs) &&
             equalExprs(a->rhs, b->rhs);
    case ExprKind::StrOp:
      return a->strOp == b->strOp && equalExprs(a->recv, b->recv) &&
             equalExprLists(a->args, b->args);
    case ExprKind::Call:
      return a->name == b->name && equalExprs(a->recv, b->recv) &&
             equalExprLists(a->args, b->args);
    case ExprKind::StaticCall:
      return a->className == b->className && a->name == b->name &&
             equalExprLists(a->args, b->args);
    case ExprKind::New:
      return a->className == b->className && equalExprLists(a->args, b->args);
  }
  return false;
}

inline bool equalStmts(const Stmt& a, const Stmt& b);

inline bool equalBlocks(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!equalStmts(a[i], b[i])) return false;
  return true;
}

inline bool equalStmts(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  return a.name == b.name && equalExprs(a.receiver, b.receiver) &&
         equalExprs(a.expr, b.expr) && equalBlocks(a.thenBody, b.thenBody) &&
         equalBlocks(a.elseBody, b.elseBody);
}

inline bool equalMethods(const MethodDef& a, const MethodDef& b) {
  if (a.name != b.name || a.isStatic != b.isStatic || a.isCtor != b.isCtor)
    return false;
  if (!(a.returnType == b.returnType)) return false;
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name) return false;
    if (!(a.params[i].type == b.params[i].type)) return false;
  }
  return equalBlocks(a.body, b.body);
}

inline bool equalPrograms(const Program& a, const Program& b) {
  if (a.classes.size() != b.classes.size()) return false;
  for (size_t i = 0; i < a.classes.size(); ++i) {
    const ClassDef& ca = a.classes[i];
    const ClassDef& cb = b.classes[i];
    if (ca.name != cb.name) return false;
    if (ca.fields.size() != cb.fields.size()) return false;
    for (size_t j = 0; j < ca.fields.size(); ++j) {
      if (ca.fields[j].name != cb.fields[j].name) return false;
      if (!(ca.fields[j].type == cb.fields[j].type)) return false;
      if (ca.fields[j].isPublic != cb.fields[j].isPublic) return false;
    }
    if (ca.constructors.size() != cb.constructors.size()) return false;
    for (size_t j = 0; j < ca.constructors.size(); ++j)
      if (!equalMethods(ca.constructors[j], cb.constructors[j])) return false;
    if (ca.methods.size() != cb.methods.size()) return false;
    for (size_t j = 0; j < ca.methods.size(); ++j)
      if (!equalMethods(ca.methods[j], cb.methods[j])) return false;
  }
  return true;
}

}  // namespace modgen

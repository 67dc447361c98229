#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "modgen/ast.hpp"
#include "modgen/lexer.hpp"

namespace modgen {

struct ParseResult {
  Program program;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Recursive-descent parser. Comparisons `a > b` and `a >= b` are stored as
// `b < a` and `b <= a`; `!e` is pushed inward (only boolean atoms become
// `e == false`); unary minus folds
// into integer literals. Classes without an explicit constructor get an
// empty zero-argument one.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ParseResult run() {
    ParseResult res;
    try {
      while (!at(Tok::End)) {
        if (at(Tok::Error)) fail(cur().pos, cur().text);
        res.program.classes.push_back(parseClass());
      }
    } catch (const Bail&) {
      res.diagnostics = diags_;
      return res;
    }
    for (auto& cls : res.program.classes) synthesizeDefaultCtor(cls);
    res.diagnostics = diags_;
    return res;
  }

 private:
  struct Bail {};

  ClassDef parseClass() {
    ClassDef cls;
    cls.pos = cur().pos;
    expect(Tok::KwClass, "expected 'class'");
    cls.name = expectIdent("expected class name");
    expect(Tok::LBrace, "expected '{'");
    while (!at(Tok::RBrace)) {
      if (at(Tok::End) || at(Tok::Error)) fail(cur().pos, "expected '}' before end of input");
      parseMember(cls);
    }
    expect(Tok::RBrace, "expected '}'");
    return cls;
  }

  void parseMember(ClassDef& cls) {
    SrcPos pos = cur().pos;
    bool isPublic = false;
    if (at(Tok::KwPublic)) {
      isPublic = true;
      eat();
    } else if (at(Tok::KwPrivate)) {
      eat();
    }
    bool isStatic = false;
    if (at(Tok::KwStatic)) {
      isStatic = true;
      eat();
    }
    // Constructor: the class name followed by '('.
    if (at(Tok::Ident) && cur().text == cls.name && peekIs(1, Tok::LParen)) {
      MethodDef ctor;
      ctor.pos = pos;
      ctor.name = "<init>";
      ctor.isCtor = true;
      ctor.className = cls.name;
      eat();
      ctor.params = parseParams();
      ctor.returnType = Type::voidT();
      ctor.body = parseBlock();
      cls.constructors.push_back(std::move(ctor));
      return;
    }
    Type declared = parseReturnType();
    std::string name = expectIdent("expected member name");
    if (at(Tok::LParen)) {
      MethodDef m;
      m.pos = pos;
      m.name = name;
      m.isStatic = isStatic;
      m.className = cls.name;
      m.returnType = declared;
      m.params = parseParams();
      m.body = parseBlock();
      cls.methods.push_back(std::move(m));
      return;
    }
    if (isStatic) fail(pos, "fields cannot be static");
    if (declared.isVoid()) fail(pos, "fields cannot have type void");
    FieldDef f;
    f.pos = pos;
    f.name = name;
    f.type = declared;
    f.isPublic = isPublic;
    expect(Tok::Semi, "expected ';' after field declaration");
    cls.fields.push_back(std::move(f));
  }

  std::vector<Param> parseParams() {
    expect(Tok::LParen, "expected '('");
    std::vector<Param> ps;
    if (!at(Tok::RParen)) {
      for (;;) {
        Param p;
        p.pos = cur().pos;
        p.type = parseType();
        p.name = expectIdent("expected parameter name");
        ps.push_back(std::move(p));
        if (!at(Tok::Comma)) break;
        eat();
      }
    }
    expect(Tok::RParen, "expected ')'");
    return ps;
  }

  Type parseReturnType() {
    if (at(Tok::KwVoid)) {
      eat();
      return Type::voidT();
    }
    return parseType();
  }

  Type parseType() {
    if (at(Tok::KwInt)) { eat(); return Type::intT(); }
    if (at(Tok::KwBool)) { eat(); return Type::boolT(); }
    if (at(Tok::KwStr)) { eat(); return Type::strT(); }
    if (at(Tok::Ident)) {
      std::string n = cur().text;
      eat();
      return Type::refT(n);
    }
    fail(cur().pos, "expected a type");
    return Type::voidT();
  }

  std::vector<Stmt> parseBlock() {
    expect(Tok::LBrace, "expected '{'");
    std::vector<Stmt> body;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End) || at(Tok::Error)) fail(cur().pos, "expected '}' before end of input");
      body.push_back(parseStmt());
    }
    expect(Tok::RBrace, "expected '}'");
    return body;
  }

  Stmt parseStmt() {
    SrcPos pos = cur().pos;
    if (at(Tok::KwIf)) {
      eat();
      Stmt s;
      s.kind = StmtKind::If;
      s.pos = pos;
      expect(Tok::LParen, "expected '(' after 'if'");
      s.expr = parseExpr();
      expect(Tok::RParen, "expected ')'");
      s.thenBody = parseBlock();
      if (at(Tok::KwElse)) {
        eat();
        s.elseBody = parseBlock();
      }
      return s;
    }
    if (at(Tok::KwWhile)) {
      eat();
      Stmt s;
      s.kind = StmtKind::While;
      s.pos = pos;
      expect(Tok::LParen, "expected '(' after 'while'");
      s.expr = parseExpr();
      expect(Tok::RParen, "expected ')'");
      s.thenBody = parseBlock();
      return s;
    }
    if (at(Tok::KwReturn)) {
      eat();
      Stmt s;
      s.kind = StmtKind::Return;
      s.pos = pos;
      if (!at(Tok::Semi)) s.expr = parseExpr();
      expect(Tok::Semi, "expected ';' after return");
      return s;
    }
    ExprPtr e = parseExpr();
    if (at(Tok::Assign)) {
      eat();
      ExprPtr value = parseExpr();
      expect(Tok::Semi, "expected ';' after assignment");
      Stmt s;
      s.pos = pos;
      if (e->kind == ExprKind::VarRef) {
        s.kind = StmtKind::Assign;
        s.name = e->name;
        s.expr = std::move(value);
        return s;
      }
      if (e->kind == ExprKind::FieldRead) {
        s.kind = StmtKind::FieldAssign;
        s.receiver = e->recv;
        s.name = e->name;
        s.expr = std::move(value);
        return s;
      }
      fail(pos, "left side of '=' must be a variable or field");
    }
    expect(Tok::Semi, "expected ';' after expression");
    Stmt s;
    s.kind = StmtKind::ExprStmt;
    s.pos = pos;
    s.expr = std::move(e);
    return s;
  }

  ExprPtr parseExpr() { return parseOr(); }

  ExprPtr parseOr() {
    ExprPtr lhs = parseAnd();
    while (at(Tok::OrOr)) {
      SrcPos pos = cur().pos;
      eat();
      ExprPtr rhs = parseAnd();
      lhs = makeBin(BinOpKind::Or, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  ExprPtr parseAnd() {
    ExprPtr lhs = parseCmp();
    while (at(Tok::AndAnd)) {
      SrcPos pos = cur().pos;
      eat();
      ExprPtr rhs = parseCmp();
      lhs = makeBin(BinOpKind::And, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  ExprPtr parseCmp() {
    ExprPtr lhs = parseAdd();
    if (at(Tok::Eq) || at(Tok::Ne) || at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
      Tok op = cur().kind;
      SrcPos pos = cur().pos;
      eat();
      ExprPtr rhs = parseAdd();
      switch (op) {
        case Tok::Eq: return makeBin(BinOpKind::Eq, std::move(lhs), std::move(rhs), pos);
        case Tok::Ne: return makeBin(BinOpKind::Ne, std::move(lhs), std::move(rhs), pos);
        case Tok::Lt: return makeBin(BinOpKind::Lt, std::move(lhs), std::move(rhs), pos);
        case Tok::Le: return makeBin(BinOpKind::Le, std::move(lhs), std::move(rhs), pos);
        case Tok::Gt: return makeBin(BinOpKind::Lt, std::move(rhs), std::move(lhs), pos);
        case Tok::Ge: return makeBin(BinOpKind::Le, std::move(rhs), std::move(lhs), pos);
        default: break;
      }
    }
    return lhs;
  }

  ExprPtr parseAdd() {
    ExprPtr lhs = parseMul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOpKind op = at(Tok::Plus) ? BinOpKind::Add : BinOpKind::Sub;
      SrcPos pos = cur().pos;
      eat();
      ExprPtr rhs = parseMul();
      lhs = makeBin(op, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  ExprPtr parseMul() {
    ExprPtr lhs = parseUnary();
    while (at(Tok::Star)) {
      SrcPos pos = cur().pos;
      eat();
      ExprPtr rhs = parseUnary();
      lhs = makeBin(BinOpKind::Mul, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  ExprPtr parseUnary() {
    if (at(Tok::Not)) {
      SrcPos pos = cur().pos;
      eat();
      return negated(parseUnary(), pos);
    }
    if (at(Tok::Minus)) {
      SrcPos pos = cur().pos;
      eat();
      ExprPtr inner = parseUnary();
      if (inner->kind == ExprKind::IntLit) {
        inner->intValue = -inner->intValue;
        return inner;
      }
      ExprPtr zero = makeExpr(ExprKind::IntLit, pos);
      zero->intValue = 0;
      return makeBin(BinOpKind::Sub, std::move(zero), std::move(inner), pos);
    }
    return parsePostfix();
  }

  ExprPtr parsePostfix() {
    ExprPtr e = parsePrimary();
    while (at(Tok::Dot)) {
      SrcPos pos = cur().pos;
      eat();
      std::string member = expectIdent("expected member name after '.'");
      if (at(Tok::LParen)) {
        ExprPtr call = makeExpr(ExprKind::Call, pos);
        call->recv = std::move(e);
        call->name = member;
        call->args = parseArgs();
        e = std::move(call);
      } else {
        ExprPtr read = makeExpr(ExprKind::FieldRead, pos);
        read->recv = std::move(e);
        read->name = member;
        e = std::move(read);
      }
    }
    return e;
  }

  std::vector<ExprPtr> parseArgs() {
    expect(Tok::LParen, "expected '('");
    std::vector<ExprPtr> args;
    if (!at(Tok::RParen)) {
      for (;;) {
        args.push_back(parseExpr());
        if (!at(Tok::Comma)) break;
        eat();
      }
    }
    expect(Tok::RParen, "expected ')'");
    return args;
  }

  ExprPtr parsePrimary() {
    SrcPos pos = cur().pos;
    if (at(Tok::IntLit)) {
      ExprPtr e = makeExpr(ExprKind::IntLit, pos);
      e->intValue = cur().intValue;
      eat();
      return e;
    }
    if (at(Tok::StrLit)) {
      ExprPtr e = makeExpr(ExprKind::StrLit, pos);
      e->strValue = cur().text;
      eat();
      return e;
    }
    if (at(Tok::KwTrue) || at(Tok::KwFalse)) {
      ExprPtr e = makeExpr(ExprKind::BoolLit, pos);
      e->boolValue = at(Tok::KwTrue);
      eat();
      return e;
    }
    if (at(Tok::KwNull)) {
      eat();
      return makeExpr(ExprKind::NullLit, pos);
    }
    if (at(Tok::KwThis)) {
      eat();
      return makeExpr(ExprKind::ThisRef, pos);
    }
    if (at(Tok::KwNew)) {
      eat();
      ExprPtr e = makeExpr(ExprKind::New, pos);
      e->className = expectIdent("expected class name after 'new'");
      e->args = parseArgs();
      return e;
    }
    if (at(Tok::LParen)) {
      eat();
      ExprPtr e = parseExpr();
      expect(Tok::RParen, "expected ')'");
      return e;
    }
    if (at(Tok::Ident)) {
      ExprPtr e = makeExpr(ExprKind::VarRef, pos);
      e->name = cur().text;
      eat();
      return e;
    }
    fail(pos, "expected an expression");
    return nullptr;
  }

  static ExprPtr makeBin(BinOpKind op, ExprPtr lhs, ExprPtr rhs, SrcPos pos) {
    ExprPtr e = makeExpr(ExprKind::BinOp, pos);
    e->binOp = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  // Negation is pushed inward so comparisons keep a distance gradient:
  // !(a<b) becomes b<=a, !(a&&b) becomes !a||!b. A plain boolean atom
  // becomes `atom == false`.
  static ExprPtr negated(ExprPtr e, SrcPos pos) {
    if (e->kind == ExprKind::BoolLit) {
      e->boolValue = !e->boolValue;
      return e;
    }
    if (e->kind == ExprKind::BinOp) {
      switch (e->binOp) {
        case BinOpKind::Eq: e->binOp = BinOpKind::Ne; return e;
        case BinOpKind::Ne: e->binOp = BinOpKind::Eq; return e;
        case BinOpKind::Lt:
          e->binOp = BinOpKind::Le;
          std::swap(e->lhs, e->rhs);
          return e;
        case BinOpKind::Le:
          e->binOp = BinOpKind::Lt;
          std::swap(e->lhs, e->rhs);
          return e;
        case BinOpKind::And:
          e->binOp = BinOpKind::Or;
          e->lhs = negated(std::move(e->lhs), pos);
          e->rhs = negated(std::move(e->rhs), pos);
          return e;
        case BinOpKind::Or:
          e->binOp = BinOpKind::And;
          e->lhs = negated(std::move(e->lhs), pos);
          e->rhs = negated(std::move(e->rhs), pos);
          return e;
        default:
          break;
      }
    }
    ExprPtr f = makeExpr(ExprKind::BoolLit, pos);
    f->boolValue = false;
    return makeBin(BinOpKind::Eq, std::move(e), std::move(f), pos);
  }

  static void synthesizeDefaultCtor(ClassDef& cls) {
    if (!cls.constructors.empty()) return;
    MethodDef ctor;
    ctor.pos = cls.pos;
    ctor.name = "<init>";
    ctor.isCtor = true;
    ctor.className = cls.name;
    ctor.returnType = Type::voidT();
    cls.constructors.push_back(std::move(ctor));
  }

  const Token& cur() const { return toks_[idx_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool peekIs(size_t off, Tok k) const {
    return idx_ + off < toks_.size() && toks_[idx_ + off].kind == k;
  }
  void eat() { if (idx_ + 1 < toks_.size()) ++idx_; }

  void expect(Tok k, const std::string& msg) {
    if (!at(k)) fail(cur().pos, msg);
    eat();
  }

  std::string expectIdent(const std::string& msg) {
    if (!at(Tok::Ident)) fail(cur().pos, msg);
    std::string n = cur().text;
    eat();
    return n;
  }

  [[noreturn]] void fail(SrcPos pos, const std::string& msg) {
    diags_.push_back({pos, msg});
    throw Bail{};
  }

  std::vector<Token> toks_;
  size_t idx_ = 0;
  std::vector<Diagnostic> diags_;
};

inline ParseResult parseProgram(const std::string& source) {
  Lexer lex(source);
  return Parser(lex.run()).run();
}

}  // namespace modgen

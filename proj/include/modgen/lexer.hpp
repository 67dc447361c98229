#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "modgen/ast.hpp"

namespace modgen {

enum class Tok {
  Ident, IntLit, StrLit,
  KwClass, KwPublic, KwPrivate, KwStatic, KwVoid, KwInt, KwBool, KwStr,
  KwIf, KwElse, KwWhile, KwReturn, KwNew, KwTrue, KwFalse, KwNull, KwThis,
  LBrace, RBrace, LParen, RParen, Comma, Semi, Dot,
  Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, AndAnd, OrOr, Not,
  End, Error,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long intValue = 0;
  SrcPos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string source) : src_(std::move(source)) {}

  // Tokenizes the whole input. On a bad character or unterminated string the
  // last token has kind Error and carries a message in `text`.
  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipTrivia();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End || t.kind == Tok::Error) break;
    }
    return out;
  }

 private:
  void skipTrivia() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
        advance();
      if (src_.compare(pos_, 2, "//") == 0) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (src_.compare(pos_, 2, "/*") == 0) {
        advance();
        advance();
        while (pos_ < src_.size() && src_.compare(pos_, 2, "*/") != 0) advance();
        if (pos_ < src_.size()) {
          advance();
          advance();
        }
        continue;
      }
      break;
    }
  }

  Token next() {
    Token t;
    t.pos = {line_, col_};
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        word += src_[pos_];
        advance();
      }
      t.kind = keyword(word);
      t.text = word;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long long v = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        v = v * 10 + (src_[pos_] - '0');
        advance();
      }
      t.kind = Tok::IntLit;
      t.intValue = v;
      return t;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        char d = src_[pos_];
        if (d == '\n') break;
        if (d == '\\' && pos_ + 1 < src_.size()) {
          advance();
          char e = src_[pos_];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '\\': s += '\\'; break;
            case '"': s += '"'; break;
            default: s += e; break;
          }
          advance();
          continue;
        }
        s += d;
        advance();
      }
      if (pos_ >= src_.size() || src_[pos_] != '"') {
        t.kind = Tok::Error;
        t.text = "unterminated string literal";
        return t;
      }
      advance();
      t.kind = Tok::StrLit;
      t.text = s;
      return t;
    }
    // Punctuation and operators.
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('=', '=')) return punct(t, Tok::Eq, 2);
    if (two('!', '=')) return punct(t, Tok::Ne, 2);
    if (two('<', '=')) return punct(t, Tok::Le, 2);
    if (two('>', '=')) return punct(t, Tok::Ge, 2);
    if (two('&', '&')) return punct(t, Tok::AndAnd, 2);
    if (two('|', '|')) return punct(t, Tok::OrOr, 2);
    switch (c) {
      case '{': return punct(t, Tok::LBrace, 1);
      case '}': return punct(t, Tok::RBrace, 1);
      case '(': return punct(t, Tok::LParen, 1);
      case ')': return punct(t, Tok::RParen, 1);
      case ',': return punct(t, Tok::Comma, 1);
      case ';': return punct(t, Tok::Semi, 1);
      case '.': return punct(t, Tok::Dot, 1);
      case '=': return punct(t, Tok::Assign, 1);
      case '<': return punct(t, Tok::Lt, 1);
      case '>': return punct(t, Tok::Gt, 1);
      case '+': return punct(t, Tok::Plus, 1);
      case '-': return punct(t, Tok::Minus, 1);
      case '*': return punct(t, Tok::Star, 1);
      case '!': return punct(t, Tok::Not, 1);
      default:
        t.kind = Tok::Error;
        t.text = std::string("unexpected character '") + c + "'";
        return t;
    }
  }

  Token punct(Token t, Tok kind, int width) {
    t.kind = kind;
    t.text = src_.substr(pos_, width);
    for (int i = 0; i < width; ++i) advance();
    return t;
  }

  static Tok keyword(const std::string& w) {
    if (w == "class") return Tok::KwClass;
    if (w == "public") return Tok::KwPublic;
    if (w == "private") return Tok::KwPrivate;
    if (w == "static") return Tok::KwStatic;
    if (w == "void") return Tok::KwVoid;
    if (w == "int") return Tok::KwInt;
    if (w == "bool") return Tok::KwBool;
    if (w == "str") return Tok::KwStr;
    if (w == "if") return Tok::KwIf;
    if (w == "else") return Tok::KwElse;
    if (w == "while") return Tok::KwWhile;
    if (w == "return") return Tok::KwReturn;
    if (w == "new") return Tok::KwNew;
    if (w == "true") return Tok::KwTrue;
    if (w == "false") return Tok::KwFalse;
    if (w == "null") return Tok::KwNull;
    if (w == "this") return Tok::KwThis;
    return Tok::Ident;
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string src_;  // owned copy so a Lexer built from a temporary stays valid
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace modgen

/*
 * Copyright (c) 2026 The relsched authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "expr.hpp"

#include <cctype>

namespace relsched {

namespace {

struct Token {
  enum class Type { Num, Ident, Op, End } type = Type::End;
  int64_t num = 0;
  std::string text;
};

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& cur() const { return cur_; }

  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) pos_++;
    if (pos_ >= s_.size()) {
      cur_ = Token{Token::Type::End, 0, ""};
      return;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) pos_++;
      cur_ = Token{Token::Type::Num, std::stoll(s_.substr(start, pos_ - start)), ""};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
              s_[pos_] == '[' || s_[pos_] == ']')) {
        pos_++;
      }
      cur_ = Token{Token::Type::Ident, 0, s_.substr(start, pos_ - start)};
      return;
    }
    static const char* two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
    for (const char* op : two_char) {
      if (s_.compare(pos_, 2, op) == 0) {
        cur_ = Token{Token::Type::Op, 0, op};
        pos_ += 2;
        return;
      }
    }
    if (std::string("+-*%<>!?:()").find(c) != std::string::npos) {
      cur_ = Token{Token::Type::Op, 0, std::string(1, c)};
      pos_++;
      return;
    }
    throw std::runtime_error("expr: unexpected character '" + std::string(1, c) + "' in \"" + s_ + "\"");
  }

private:
  const std::string& s_;
  size_t pos_ = 0;
  Token cur_;
};

} // namespace

class ExprParser {
public:
  ExprParser(const std::string& text, const Expr::Resolver& resolve)
      : lex_(text), resolve_(resolve) {}

  Expr run(const std::string& text) {
    Expr e;
    e.text_ = text;
    out_ = &e;
    e.root_ = parse_ternary();
    if (lex_.cur().type != Token::Type::End)
      throw std::runtime_error("expr: trailing tokens in \"" + text + "\"");
    return e;
  }

private:
  Lexer lex_;
  const Expr::Resolver& resolve_;
  Expr* out_ = nullptr;

  int32_t add(Expr::Node n) {
    out_->nodes_.push_back(std::move(n));
    return static_cast<int32_t>(out_->nodes_.size() - 1);
  }

  bool eat_op(const char* op) {
    if (lex_.cur().type == Token::Type::Op && lex_.cur().text == op) {
      lex_.advance();
      return true;
    }
    return false;
  }

  int32_t parse_ternary() {
    int32_t cond = parse_or();
    if (!eat_op("?")) return cond;
    int32_t then = parse_ternary();
    if (!eat_op(":")) throw std::runtime_error("expr: missing ':' in conditional");
    int32_t els = parse_ternary();
    Expr::Node n;
    n.kind = Expr::Kind::Cond;
    n.a = cond;
    n.b = then;
    n.c = els;
    return add(n);
  }

  int32_t binary(Expr::Kind k, int32_t a, int32_t b) {
    Expr::Node n;
    n.kind = k;
    n.a = a;
    n.b = b;
    return add(n);
  }

  int32_t parse_or() {
    int32_t lhs = parse_and();
    while (eat_op("||")) lhs = binary(Expr::Kind::Or, lhs, parse_and());
    return lhs;
  }

  int32_t parse_and() {
    int32_t lhs = parse_cmp();
    while (eat_op("&&")) lhs = binary(Expr::Kind::And, lhs, parse_cmp());
    return lhs;
  }

  int32_t parse_cmp() {
    int32_t lhs = parse_add();
    for (;;) {
      if (eat_op("==")) lhs = binary(Expr::Kind::Eq, lhs, parse_add());
      else if (eat_op("!=")) lhs = binary(Expr::Kind::Ne, lhs, parse_add());
      else if (eat_op("<=")) lhs = binary(Expr::Kind::Le, lhs, parse_add());
      else if (eat_op(">=")) lhs = binary(Expr::Kind::Ge, lhs, parse_add());
      else if (eat_op("<")) lhs = binary(Expr::Kind::Lt, lhs, parse_add());
      else if (eat_op(">")) lhs = binary(Expr::Kind::Gt, lhs, parse_add());
      else return lhs;
    }
  }

  int32_t parse_add() {
    int32_t lhs = parse_mul();
    for (;;) {
      if (eat_op("+")) lhs = binary(Expr::Kind::Add, lhs, parse_mul());
      else if (eat_op("-")) lhs = binary(Expr::Kind::Sub, lhs, parse_mul());
      else return lhs;
    }
  }

  int32_t parse_mul() {
    int32_t lhs = parse_unary();
    for (;;) {
      if (eat_op("*")) lhs = binary(Expr::Kind::Mul, lhs, parse_unary());
      else if (eat_op("%")) lhs = binary(Expr::Kind::Mod, lhs, parse_unary());
      else return lhs;
    }
  }

  int32_t parse_unary() {
    if (eat_op("!")) {
      Expr::Node n;
      n.kind = Expr::Kind::Not;
      n.a = parse_unary();
      return add(n);
    }
    if (eat_op("-")) {
      Expr::Node n;
      n.kind = Expr::Kind::Neg;
      n.a = parse_unary();
      return add(n);
    }
    return parse_atom();
  }

  int32_t parse_atom() {
    const Token& t = lex_.cur();
    if (t.type == Token::Type::Num) {
      Expr::Node n;
      n.kind = Expr::Kind::Const;
      n.value = t.num;
      lex_.advance();
      return add(n);
    }
    if (t.type == Token::Type::Ident) {
      Expr::Node n;
      n.name = t.text;
      lex_.advance();
      if (n.name == "val") {
        n.kind = Expr::Kind::Val;
        return add(n);
      }
      auto [sym, slot] = resolve_(n.name);
      switch (sym) {
        case Expr::Sym::Reg: n.kind = Expr::Kind::Reg; break;
        case Expr::Sym::Input: n.kind = Expr::Kind::Input; break;
        case Expr::Sym::Shared: n.kind = Expr::Kind::Shared; break;
        case Expr::Sym::Val: n.kind = Expr::Kind::Val; break;
      }
      n.value = slot;
      return add(n);
    }
    if (eat_op("(")) {
      int32_t inner = parse_ternary();
      if (!eat_op(")")) throw std::runtime_error("expr: missing ')'");
      return inner;
    }
    throw std::runtime_error("expr: unexpected token");
  }
};

Expr Expr::parse(const std::string& text, const Resolver& resolve) {
  ExprParser p(text, resolve);
  return p.run(text);
}

int64_t Expr::eval(const EvalCtx& ctx) const {
  if (root_ < 0) throw std::runtime_error("expr: evaluating empty expression");
  return eval_node(root_, ctx);
}

int64_t Expr::eval_node(int32_t idx, const EvalCtx& ctx) const {
  const Node& n = nodes_[static_cast<size_t>(idx)];
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Reg: return ctx.regs[n.value];
    case Kind::Input: return ctx.inputs[n.value];
    case Kind::Shared: return ctx.shared[n.value];
    case Kind::Val: return ctx.read_val;
    case Kind::Not: return eval_node(n.a, ctx) == 0 ? 1 : 0;
    case Kind::Neg: return -eval_node(n.a, ctx);
    case Kind::Mul: return eval_node(n.a, ctx) * eval_node(n.b, ctx);
    case Kind::Mod: {
      int64_t d = eval_node(n.b, ctx);
      return d == 0 ? 0 : eval_node(n.a, ctx) % d;
    }
    case Kind::Add: return eval_node(n.a, ctx) + eval_node(n.b, ctx);
    case Kind::Sub: return eval_node(n.a, ctx) - eval_node(n.b, ctx);
    case Kind::Lt: return eval_node(n.a, ctx) < eval_node(n.b, ctx) ? 1 : 0;
    case Kind::Le: return eval_node(n.a, ctx) <= eval_node(n.b, ctx) ? 1 : 0;
    case Kind::Gt: return eval_node(n.a, ctx) > eval_node(n.b, ctx) ? 1 : 0;
    case Kind::Ge: return eval_node(n.a, ctx) >= eval_node(n.b, ctx) ? 1 : 0;
    case Kind::Eq: return eval_node(n.a, ctx) == eval_node(n.b, ctx) ? 1 : 0;
    case Kind::Ne: return eval_node(n.a, ctx) != eval_node(n.b, ctx) ? 1 : 0;
    case Kind::And: return (eval_node(n.a, ctx) != 0 && eval_node(n.b, ctx) != 0) ? 1 : 0;
    case Kind::Or: return (eval_node(n.a, ctx) != 0 || eval_node(n.b, ctx) != 0) ? 1 : 0;
    case Kind::Cond:
      return eval_node(n.a, ctx) != 0 ? eval_node(n.b, ctx) : eval_node(n.c, ctx);
  }
  return 0;
}

std::vector<std::string> Expr::identifiers() const {
  std::vector<std::string> out;
  for (const Node& n : nodes_)
    if (!n.name.empty()) out.push_back(n.name);
  return out;
}

} // namespace relsched

/**
 * Copyright 2026 The Koa Authors
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

#include "koa/parser.hpp"

#include <charconv>
#include <set>
#include <string>

#include <fmt/core.h>

namespace koa {

namespace {

std::size_t idx(TokenKind k) { return static_cast<std::size_t>(k); }

/// Internal unwinding signal for a single syntax error.
struct Bail {
  Diagnostic diag;
};

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::EndOfFile: return "end of file";
    case TokenKind::Identifier: return fmt::format("identifier '{}'", tok.lexeme);
    case TokenKind::IntLiteral: return fmt::format("integer '{}'", tok.lexeme);
    case TokenKind::StringLiteral: return fmt::format("string {}", tok.lexeme);
    default: return fmt::format("'{}'", tok.lexeme);
  }
}

bool starts_expression(TokenKind k) {
  switch (k) {
    case TokenKind::IntLiteral:
    case TokenKind::StringLiteral:
    case TokenKind::TrueLit:
    case TokenKind::FalseLit:
    case TokenKind::Identifier:
    case TokenKind::Minus:
    case TokenKind::Bang:
    case TokenKind::LParen:
      return true;
    default:
      return false;
  }
}

InfixOp infix_op(TokenKind k) {
  switch (k) {
    case TokenKind::Plus: return InfixOp::Add;
    case TokenKind::Minus: return InfixOp::Sub;
    case TokenKind::Star: return InfixOp::Mul;
    case TokenKind::Slash: return InfixOp::Div;
    case TokenKind::Percent: return InfixOp::Mod;
    case TokenKind::Eq: return InfixOp::Eq;
    case TokenKind::NotEq: return InfixOp::NotEq;
    case TokenKind::Lt: return InfixOp::Lt;
    case TokenKind::Lte: return InfixOp::Lte;
    case TokenKind::Gt: return InfixOp::Gt;
    case TokenKind::Gte: return InfixOp::Gte;
    case TokenKind::AndAnd: return InfixOp::And;
    case TokenKind::OrOr: return InfixOp::Or;
    default: break;
  }
  throw std::logic_error("not an infix operator token");
}

}  // namespace

Precedence infix_precedence(TokenKind kind) {
  switch (kind) {
    case TokenKind::OrOr: return Precedence::Or;
    case TokenKind::AndAnd: return Precedence::And;
    case TokenKind::Eq:
    case TokenKind::NotEq: return Precedence::Equality;
    case TokenKind::Lt:
    case TokenKind::Lte:
    case TokenKind::Gt:
    case TokenKind::Gte: return Precedence::Comparison;
    case TokenKind::Plus:
    case TokenKind::Minus: return Precedence::Sum;
    case TokenKind::Star:
    case TokenKind::Slash:
    case TokenKind::Percent: return Precedence::Product;
    case TokenKind::LParen: return Precedence::CallLevel;
    default: return Precedence::Lowest;
  }
}

Parser::Parser(TokenBuffer& buffer) : buf_(buffer) {
  prefix_[idx(TokenKind::IntLiteral)] = &Parser::parse_int;
  prefix_[idx(TokenKind::StringLiteral)] = &Parser::parse_string;
  prefix_[idx(TokenKind::TrueLit)] = &Parser::parse_bool;
  prefix_[idx(TokenKind::FalseLit)] = &Parser::parse_bool;
  prefix_[idx(TokenKind::Identifier)] = &Parser::parse_ident;
  prefix_[idx(TokenKind::Minus)] = &Parser::parse_prefix;
  prefix_[idx(TokenKind::Bang)] = &Parser::parse_prefix;
  prefix_[idx(TokenKind::LParen)] = &Parser::parse_group;

  for (TokenKind k : {TokenKind::Plus, TokenKind::Minus, TokenKind::Star, TokenKind::Slash,
                      TokenKind::Percent, TokenKind::Eq, TokenKind::NotEq, TokenKind::Lt,
                      TokenKind::Lte, TokenKind::Gt, TokenKind::Gte, TokenKind::AndAnd,
                      TokenKind::OrOr}) {
    infix_[idx(k)] = &Parser::parse_infix;
  }
  infix_[idx(TokenKind::LParen)] = &Parser::parse_call;
}

Token Parser::advance() {
  Token t = buf_.next();
  if (t.kind == TokenKind::LBrace) ++depth_;
  if (t.kind == TokenKind::RBrace) --depth_;
  return t;
}

void Parser::fail(const Token& at, std::string_view expected) const {
  throw Bail{{Stage::Parse, at.line, at.col,
              fmt::format("expected {}, found {}", expected, describe(at))}};
}

Token Parser::expect(TokenKind kind, std::string_view what) {
  if (buf_.peek().kind != kind) fail(buf_.peek(), what.empty() ? to_string(kind) : what);
  return advance();
}

// ---------------------------------------------------------------------------
// Expressions

ExprPtr Parser::parse_expression(Precedence min_prec) {
  try {
    Token tok = buf_.peek();
    PrefixFn prefix = prefix_[idx(tok.kind)];
    if (prefix == nullptr) fail(tok, "expression");
    advance();
    ExprPtr left = (this->*prefix)(tok);
    while (infix_precedence(buf_.peek().kind) > min_prec) {
      Token op = advance();
      left = (this->*infix_[idx(op.kind)])(op, std::move(left));
    }
    return left;
  } catch (const Bail& b) {
    throw ParseError({b.diag});
  }
}

ExprPtr Parser::parse_int(const Token& tok) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(tok.lexeme.data(), tok.lexeme.data() + tok.lexeme.size(), value);
  if (ec != std::errc() || ptr != tok.lexeme.data() + tok.lexeme.size()) {
    fail(tok, "integer literal in the signed 64-bit range");
  }
  return make_expr(IntLit{value}, tok.pos());
}

ExprPtr Parser::parse_string(const Token& tok) {
  return make_expr(StrLit{decode_string_literal(tok.lexeme)}, tok.pos());
}

ExprPtr Parser::parse_bool(const Token& tok) {
  return make_expr(BoolLit{tok.kind == TokenKind::TrueLit}, tok.pos());
}

ExprPtr Parser::parse_ident(const Token& tok) {
  return make_expr(Ident{tok.lexeme}, tok.pos());
}

ExprPtr Parser::parse_prefix(const Token& tok) {
  PrefixOp op = tok.kind == TokenKind::Minus ? PrefixOp::Neg : PrefixOp::Not;
  ExprPtr operand = parse_expression(Precedence::Prefix);
  return make_expr(Prefix{op, std::move(operand)}, tok.pos());
}

ExprPtr Parser::parse_group(const Token&) {
  ExprPtr inner = parse_expression(Precedence::Lowest);
  expect(TokenKind::RParen);
  return inner;
}

ExprPtr Parser::parse_infix(const Token& tok, ExprPtr left) {
  ExprPtr right = parse_expression(infix_precedence(tok.kind));
  return make_expr(Infix{infix_op(tok.kind), std::move(left), std::move(right)}, tok.pos());
}

ExprPtr Parser::parse_call(const Token& tok, ExprPtr left) {
  const auto* callee = std::get_if<Ident>(&left->node);
  if (callee == nullptr) {
    throw Bail{{Stage::Parse, tok.line, tok.col, "only named functions can be called"}};
  }
  Call call{callee->name, {}};
  if (buf_.peek().kind != TokenKind::RParen) {
    for (;;) {
      call.args.push_back(parse_expression(Precedence::Lowest));
      if (buf_.peek().kind != TokenKind::Comma) break;
      advance();
    }
  }
  expect(TokenKind::RParen, "',' or ')'");
  return make_expr(std::move(call), left->pos);
}

// ---------------------------------------------------------------------------
// Statements and declarations

Type Parser::parse_type() {
  switch (buf_.peek().kind) {
    case TokenKind::KwInt: advance(); return Type::Int;
    case TokenKind::KwBool: advance(); return Type::Bool;
    case TokenKind::KwString: advance(); return Type::String;
    default: fail(buf_.peek(), "type");
  }
}

Block Parser::parse_block() {
  expect(TokenKind::LBrace);
  Block block;
  while (buf_.peek().kind != TokenKind::RBrace) {
    if (buf_.at_end()) fail(buf_.peek(), "'}'");
    block.stmts.push_back(parse_statement());
  }
  advance();
  return block;
}

Stmt Parser::parse_statement() {
  const Token start = buf_.peek();
  Stmt stmt;
  stmt.pos = start.pos();
  switch (start.kind) {
    case TokenKind::KwLet: {
      advance();
      LetStmt let;
      let.name = expect(TokenKind::Identifier, "variable name").lexeme;
      let.declared = parse_type();
      expect(TokenKind::Assign);
      let.init = parse_expression();
      stmt.node = std::move(let);
      return stmt;
    }
    case TokenKind::KwIf: {
      advance();
      IfStmt s;
      s.cond = parse_expression();
      s.then_block = parse_block();
      if (buf_.peek().kind == TokenKind::KwElse) {
        advance();
        if (buf_.peek().kind == TokenKind::KwIf) {
          Block nested;
          nested.stmts.push_back(parse_statement());
          s.else_block = std::move(nested);
        } else {
          s.else_block = parse_block();
        }
      }
      stmt.node = std::move(s);
      return stmt;
    }
    case TokenKind::KwReturn: {
      advance();
      ReturnStmt r;
      if (starts_expression(buf_.peek().kind)) r.value = parse_expression();
      stmt.node = std::move(r);
      return stmt;
    }
    case TokenKind::Identifier:
      if (buf_.peek(1).kind == TokenKind::Assign) {
        advance();
        advance();
        stmt.node = AssignStmt{start.lexeme, parse_expression()};
        return stmt;
      }
      break;
    default:
      break;
  }
  if (!starts_expression(start.kind)) fail(start, "statement");
  ExprStmt e{parse_expression()};
  if (buf_.peek().kind == TokenKind::LBrace) {
    // `while (c) { ... }` and friends: there are no loop statements.
    throw Bail{{Stage::Parse, start.line, start.col,
                fmt::format("expected end of statement after '{}', found '{{'",
                            start.lexeme)}};
  }
  stmt.node = std::move(e);
  return stmt;
}

FunctionDecl Parser::parse_function() {
  FunctionDecl fn;
  fn.pos = expect(TokenKind::KwFunc).pos();
  Token name = expect(TokenKind::Identifier, "function name");
  fn.name = name.lexeme;
  fn.pos = name.pos();
  expect(TokenKind::LParen);
  std::set<std::string> seen;
  if (buf_.peek().kind != TokenKind::RParen) {
    for (;;) {
      Token pname = expect(TokenKind::Identifier, "parameter name");
      Param p{pname.lexeme, parse_type(), pname.pos()};
      if (!seen.insert(p.name).second) {
        throw Bail{{Stage::Parse, pname.line, pname.col,
                    fmt::format("duplicate parameter '{}'", p.name)}};
      }
      fn.params.push_back(std::move(p));
      if (buf_.peek().kind != TokenKind::Comma) break;
      advance();
    }
  }
  expect(TokenKind::RParen, "',' or ')'");
  switch (buf_.peek().kind) {
    case TokenKind::KwInt:
    case TokenKind::KwBool:
    case TokenKind::KwString:
      fn.return_type = parse_type();
      break;
    default:
      fn.return_type = Type::Void;
  }
  fn.body = parse_block();
  return fn;
}

void Parser::synchronize() {
  while (!buf_.at_end()) {
    const Token& t = buf_.peek();
    if (t.kind == TokenKind::KwFunc) {
      depth_ = 1;
      return;
    }
    if (t.kind == TokenKind::RBrace && depth_ == 1) return;
    advance();
  }
}

Contract Parser::parse_contract() {
  std::vector<Diagnostic> errors;
  Contract contract;
  try {
    contract.pos = expect(TokenKind::KwContract).pos();
    Token name = expect(TokenKind::Identifier, "contract name");
    contract.name = name.lexeme;
    expect(TokenKind::LBrace);
  } catch (const Bail& b) {
    throw ParseError({b.diag});
  }

  std::set<std::string> names;
  while (!buf_.at_end() && !(buf_.peek().kind == TokenKind::RBrace && depth_ == 1)) {
    try {
      if (buf_.peek().kind != TokenKind::KwFunc) fail(buf_.peek(), "'func'");
      FunctionDecl fn = parse_function();
      if (!names.insert(fn.name).second) {
        errors.push_back({Stage::Parse, fn.pos.line, fn.pos.col,
                          fmt::format("duplicate function '{}'", fn.name)});
      }
      contract.functions.push_back(std::move(fn));
    } catch (const Bail& b) {
      errors.push_back(b.diag);
      if (buf_.peek().kind != TokenKind::KwFunc) advance();
      synchronize();
    } catch (const ParseError& e) {
      errors.insert(errors.end(), e.diagnostics().begin(), e.diagnostics().end());
      if (buf_.peek().kind != TokenKind::KwFunc) advance();
      synchronize();
    }
  }

  if (buf_.at_end()) {
    if (errors.empty()) {
      const Token& eof = buf_.peek();
      errors.push_back({Stage::Parse, eof.line, eof.col, "expected '}', found end of file"});
    }
  } else {
    Token close = advance();
    if (contract.functions.empty() && errors.empty()) {
      errors.push_back({Stage::Parse, close.line, close.col,
                        "expected 'func', found '}'"});
    }
    if (!buf_.at_end()) {
      const Token& stray = buf_.peek();
      errors.push_back({Stage::Parse, stray.line, stray.col,
                        fmt::format("expected end of file, found {}", describe(stray))});
    }
  }

  if (!errors.empty()) throw ParseError(std::move(errors));
  return contract;
}

Contract parse_contract(TokenBuffer& buffer) { return Parser(buffer).parse_contract(); }

ExprPtr parse_expression(TokenBuffer& buffer, Precedence min_prec) {
  return Parser(buffer).parse_expression(min_prec);
}

Contract parse_source(std::string_view source) {
  TokenBuffer buffer = TokenBuffer::from_source(source);
  return parse_contract(buffer);
}

}  // namespace koa

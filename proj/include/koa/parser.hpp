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

#ifndef KOA_PARSER_HPP
#define KOA_PARSER_HPP

#include <array>
#include <cstddef>
#include <string_view>

#include "koa/ast.hpp"
#include "koa/lexer.hpp"

namespace koa {

/// Binding power of infix operators. All infix operators are left-associative.
enum class Precedence : int {
  Lowest = 0,
  Or = 1,
  And = 2,
  Equality = 3,
  Comparison = 4,
  Sum = 5,
  Product = 6,
  Prefix = 7,
  CallLevel = 8,
};

/// Infix binding power of `kind`; Lowest for tokens that are not infix.
Precedence infix_precedence(TokenKind kind);

/// Pratt parser over a TokenBuffer. Each token kind registers a prefix and/or
/// infix parse function; parse_expression drives them by precedence.
class Parser {
 public:
  explicit Parser(TokenBuffer& buffer);

  /// Parses a whole contract and requires the buffer to be exhausted.
  /// Recovers at `func` / contract `}` boundaries so that every syntax error
  /// in the file is reported; throws ParseError carrying all of them.
  Contract parse_contract();

  /// Throws ParseError with a single diagnostic on failure.
  ExprPtr parse_expression(Precedence min_prec = Precedence::Lowest);

 private:
  using PrefixFn = ExprPtr (Parser::*)(const Token&);
  using InfixFn = ExprPtr (Parser::*)(const Token&, ExprPtr);

  static constexpr std::size_t kKinds = static_cast<std::size_t>(TokenKind::Illegal) + 1;

  ExprPtr parse_int(const Token& tok);
  ExprPtr parse_string(const Token& tok);
  ExprPtr parse_bool(const Token& tok);
  ExprPtr parse_ident(const Token& tok);
  ExprPtr parse_prefix(const Token& tok);
  ExprPtr parse_group(const Token& tok);
  ExprPtr parse_infix(const Token& tok, ExprPtr left);
  ExprPtr parse_call(const Token& tok, ExprPtr left);

  FunctionDecl parse_function();
  Block parse_block();
  Stmt parse_statement();
  Type parse_type();

  Token advance();
  Token expect(TokenKind kind, std::string_view what = {});
  [[noreturn]] void fail(const Token& at, std::string_view expected) const;
  void synchronize();

  TokenBuffer& buf_;
  int depth_ = 0;  // brace nesting of consumed tokens
  std::array<PrefixFn, kKinds> prefix_{};
  std::array<InfixFn, kKinds> infix_{};
};

Contract parse_contract(TokenBuffer& buffer);
ExprPtr parse_expression(TokenBuffer& buffer, Precedence min_prec = Precedence::Lowest);

/// tokenize + parse_contract.
Contract parse_source(std::string_view source);

}  // namespace koa

#endif  // KOA_PARSER_HPP

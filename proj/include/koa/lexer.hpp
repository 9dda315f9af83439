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

#ifndef KOA_LEXER_HPP
#define KOA_LEXER_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "koa/diagnostics.hpp"

namespace koa {

enum class TokenKind : std::uint8_t {
  IntLiteral,
  StringLiteral,
  TrueLit,
  FalseLit,
  Identifier,
  KwContract,
  KwFunc,
  KwLet,
  KwIf,
  KwElse,
  KwReturn,
  KwInt,
  KwBool,
  KwString,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Bang,
  Assign,
  Eq,
  NotEq,
  Lt,
  Lte,
  Gt,
  Gte,
  AndAnd,
  OrOr,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  EndOfFile,
  Illegal,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string lexeme;  // exact source text; string literals keep their quotes
  int line = 1;
  int col = 1;

  [[nodiscard]] SourcePos pos() const { return {line, col}; }

  friend bool operator==(const Token&, const Token&) = default;
};

/// Splits `source` into tokens. The result always ends with EndOfFile.
/// Throws LexError on an unrecognized character, an unterminated or badly
/// escaped string literal, or an integer literal outside the int64 range.
std::vector<Token> tokenize(std::string_view source);

/// Decodes the escapes of a StringLiteral lexeme (quotes included).
std::string decode_string_literal(std::string_view lexeme);

/// Inverse of decode_string_literal: quotes and escapes `text`.
std::string quote_string(std::string_view text);

/// Cursor over a token sequence. The parser reads tokens only through this.
class TokenBuffer {
 public:
  explicit TokenBuffer(std::vector<Token> tokens);

  static TokenBuffer from_source(std::string_view source) {
    return TokenBuffer(tokenize(source));
  }

  /// Token `k` positions ahead of the cursor, saturating at EndOfFile.
  [[nodiscard]] const Token& peek(std::size_t k = 0) const;

  /// Returns the token at the cursor and advances unless at EndOfFile.
  Token next();

  [[nodiscard]] std::size_t cursor() const { return cursor_; }
  [[nodiscard]] bool at_end() const {
    return tokens_[cursor_].kind == TokenKind::EndOfFile;
  }
  [[nodiscard]] std::size_t size() const { return tokens_.size(); }

 private:
  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
};

}  // namespace koa

#endif  // KOA_LEXER_HPP

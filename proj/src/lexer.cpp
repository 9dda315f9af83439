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

#include "koa/lexer.hpp"

#include <array>
#include <limits>
#include <utility>

#include <fmt/core.h>

namespace koa {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::IntLiteral: return "integer literal";
    case TokenKind::StringLiteral: return "string literal";
    case TokenKind::TrueLit: return "'true'";
    case TokenKind::FalseLit: return "'false'";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::KwContract: return "'contract'";
    case TokenKind::KwFunc: return "'func'";
    case TokenKind::KwLet: return "'let'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::KwInt: return "'int'";
    case TokenKind::KwBool: return "'bool'";
    case TokenKind::KwString: return "'string'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::Bang: return "'!'";
    case TokenKind::Assign: return "'='";
    case TokenKind::Eq: return "'=='";
    case TokenKind::NotEq: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Lte: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Gte: return "'>='";
    case TokenKind::AndAnd: return "'&&'";
    case TokenKind::OrOr: return "'||'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::EndOfFile: return "end of file";
    case TokenKind::Illegal: return "illegal token";
  }
  return "?";
}

namespace {

struct Keyword {
  std::string_view text;
  TokenKind kind;
};

constexpr std::array<Keyword, 11> kKeywords{{
    {"contract", TokenKind::KwContract},
    {"func", TokenKind::KwFunc},
    {"let", TokenKind::KwLet},
    {"if", TokenKind::KwIf},
    {"else", TokenKind::KwElse},
    {"return", TokenKind::KwReturn},
    {"int", TokenKind::KwInt},
    {"bool", TokenKind::KwBool},
    {"string", TokenKind::KwString},
    {"true", TokenKind::TrueLit},
    {"false", TokenKind::FalseLit},
}};

bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(lex_one());
    }
    out.push_back(Token{TokenKind::EndOfFile, "", line_, col_});
    return out;
  }

 private:
  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char ahead(std::size_t k) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
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

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = cur();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && ahead(1) == '/') {
        while (pos_ < src_.size() && cur() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t start, int line, int col) {
    return Token{kind, std::string(src_.substr(start, pos_ - start)), line, col};
  }

  Token lex_one() {
    const std::size_t start = pos_;
    const int line = line_;
    const int col = col_;
    const char c = cur();

    if (is_alpha(c)) {
      while (is_alpha(cur()) || is_digit(cur())) advance();
      std::string_view word = src_.substr(start, pos_ - start);
      for (const auto& kw : kKeywords) {
        if (kw.text == word) return make(kw.kind, start, line, col);
      }
      return make(TokenKind::Identifier, start, line, col);
    }

    if (is_digit(c)) {
      constexpr auto kMax = static_cast<std::uint64_t>(
          std::numeric_limits<std::int64_t>::max());
      std::uint64_t value = 0;
      bool overflow = false;
      while (is_digit(cur())) {
        auto digit = static_cast<std::uint64_t>(cur() - '0');
        if (value > (kMax - digit) / 10) overflow = true;
        if (!overflow) value = value * 10 + digit;
        advance();
      }
      if (is_alpha(cur())) {
        throw LexError(line_, col_,
                       fmt::format("unexpected character '{}' in integer literal", cur()));
      }
      if (overflow) {
        throw LexError(line, col, "integer literal exceeds the signed 64-bit range");
      }
      return make(TokenKind::IntLiteral, start, line, col);
    }

    if (c == '"') return lex_string(start, line, col);

    auto two = [&](char second, TokenKind pair, TokenKind single) {
      advance();
      if (cur() == second) {
        advance();
        return make(pair, start, line, col);
      }
      return make(single, start, line, col);
    };

    switch (c) {
      case '+': advance(); return make(TokenKind::Plus, start, line, col);
      case '-': advance(); return make(TokenKind::Minus, start, line, col);
      case '*': advance(); return make(TokenKind::Star, start, line, col);
      case '/': advance(); return make(TokenKind::Slash, start, line, col);
      case '%': advance(); return make(TokenKind::Percent, start, line, col);
      case '(': advance(); return make(TokenKind::LParen, start, line, col);
      case ')': advance(); return make(TokenKind::RParen, start, line, col);
      case '{': advance(); return make(TokenKind::LBrace, start, line, col);
      case '}': advance(); return make(TokenKind::RBrace, start, line, col);
      case ',': advance(); return make(TokenKind::Comma, start, line, col);
      case '!': return two('=', TokenKind::NotEq, TokenKind::Bang);
      case '=': return two('=', TokenKind::Eq, TokenKind::Assign);
      case '<': return two('=', TokenKind::Lte, TokenKind::Lt);
      case '>': return two('=', TokenKind::Gte, TokenKind::Gt);
      case '&':
        if (ahead(1) == '&') {
          advance();
          advance();
          return make(TokenKind::AndAnd, start, line, col);
        }
        break;
      case '|':
        if (ahead(1) == '|') {
          advance();
          advance();
          return make(TokenKind::OrOr, start, line, col);
        }
        break;
      default:
        break;
    }
    auto byte = static_cast<unsigned char>(c);
    if (byte < 0x20 || byte >= 0x7f) {
      throw LexError(line, col, fmt::format("unrecognized character 0x{:02x}", byte));
    }
    throw LexError(line, col, fmt::format("unrecognized character '{}'", c));
  }

  Token lex_string(std::size_t start, int line, int col) {
    advance();  // opening quote
    for (;;) {
      if (pos_ >= src_.size() || cur() == '\n') {
        throw LexError(line, col, "unterminated string literal");
      }
      char c = cur();
      if (c == '"') {
        advance();
        return make(TokenKind::StringLiteral, start, line, col);
      }
      if (c == '\\') {
        const int esc_line = line_;
        const int esc_col = col_;
        advance();
        char e = cur();
        if (e != '"' && e != '\\' && e != 'n' && e != 't') {
          if (pos_ >= src_.size()) throw LexError(line, col, "unterminated string literal");
          throw LexError(esc_line, esc_col,
                         fmt::format("unknown escape sequence '\\{}'", e));
        }
      }
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string decode_string_literal(std::string_view lexeme) {
  std::string out;
  if (lexeme.size() < 2) return out;
  std::string_view body = lexeme.substr(1, lexeme.size() - 2);
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '\\' && i + 1 < body.size()) {
      char e = body[++i];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: out.push_back(e); break;
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c); break;
    }
  }
  out.push_back('"');
  return out;
}

TokenBuffer::TokenBuffer(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != TokenKind::EndOfFile) {
    int line = tokens_.empty() ? 1 : tokens_.back().line;
    int col = tokens_.empty()
                  ? 1
                  : tokens_.back().col + static_cast<int>(tokens_.back().lexeme.size());
    tokens_.push_back(Token{TokenKind::EndOfFile, "", line, col});
  }
}

const Token& TokenBuffer::peek(std::size_t k) const {
  std::size_t i = cursor_ + k;
  if (i >= tokens_.size()) i = tokens_.size() - 1;
  return tokens_[i];
}

Token TokenBuffer::next() {
  Token t = tokens_[cursor_];
  if (cursor_ + 1 < tokens_.size()) ++cursor_;
  return t;
}

}  // namespace koa

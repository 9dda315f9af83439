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

#include <doctest.h>

#include <fmt/core.h>

#include <random>

#include "koa/parser.hpp"
#include "program_gen.hpp"

using namespace koa;

namespace {

// Precedence climbing over the raw token stream, written against the
// operator table alone. Produces the same fully parenthesized text as
// ast_to_string so the two parsers can be compared as strings.
class ClimbingOracle {
 public:
  explicit ClimbingOracle(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::string parse() {
    std::string e = expr(1);
    if (toks_[pos_].kind != TokenKind::EndOfFile) throw std::runtime_error("trailing tokens");
    return e;
  }

 private:
  static int binary_prec(TokenKind k) {
    switch (k) {
      case TokenKind::OrOr: return 1;
      case TokenKind::AndAnd: return 2;
      case TokenKind::Eq:
      case TokenKind::NotEq: return 3;
      case TokenKind::Lt:
      case TokenKind::Lte:
      case TokenKind::Gt:
      case TokenKind::Gte: return 4;
      case TokenKind::Plus:
      case TokenKind::Minus: return 5;
      case TokenKind::Star:
      case TokenKind::Slash:
      case TokenKind::Percent: return 6;
      default: return 0;
    }
  }

  std::string expr(int min_prec) {
    std::string lhs = unary();
    for (;;) {
      const Token& op = toks_[pos_];
      int p = binary_prec(op.kind);
      if (p == 0 || p < min_prec) return lhs;
      ++pos_;
      std::string rhs = expr(p + 1);
      lhs = fmt::format("({} {} {})", lhs, op.lexeme, rhs);
    }
  }

  std::string unary() {
    const Token& t = toks_[pos_];
    if (t.kind == TokenKind::Minus || t.kind == TokenKind::Bang) {
      ++pos_;
      return fmt::format("({}{})", t.lexeme, unary());
    }
    return primary();
  }

  std::string primary() {
    const Token t = toks_[pos_++];
    switch (t.kind) {
      case TokenKind::IntLiteral:
      case TokenKind::TrueLit:
      case TokenKind::FalseLit:
      case TokenKind::StringLiteral: return t.lexeme;
      case TokenKind::LParen: {
        std::string inner = expr(1);
        if (toks_[pos_++].kind != TokenKind::RParen) throw std::runtime_error("expected )");
        return inner;
      }
      case TokenKind::Identifier: {
        if (toks_[pos_].kind != TokenKind::LParen) return t.lexeme;
        ++pos_;
        std::string out = t.lexeme + "(";
        bool first = true;
        while (toks_[pos_].kind != TokenKind::RParen) {
          if (!first) {
            if (toks_[pos_++].kind != TokenKind::Comma) throw std::runtime_error("expected ,");
            out += ", ";
          }
          out += expr(1);
          first = false;
        }
        ++pos_;
        return out + ")";
      }
      default: throw std::runtime_error("unexpected token");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string random_expression(std::mt19937_64& rng, int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const std::vector<std::string> kOps{"||", "&&", "==", "!=", "<", "<=", ">",
                                             ">=", "+",  "-",  "*",  "/", "%"};
  static const std::vector<std::string> kAtoms{"a", "b", "c", "1", "2", "30", "true", "false",
                                               "\"s\""};
  if (depth == 0) return kAtoms[static_cast<std::size_t>(pick(0, 8))];
  switch (pick(0, 6)) {
    case 0: return kAtoms[static_cast<std::size_t>(pick(0, 8))];
    case 1: return (pick(0, 1) ? "-" : "!") + random_expression(rng, depth - 1);
    case 2: return "(" + random_expression(rng, depth - 1) + ")";
    case 3: {
      std::string out = "f(";
      int n = pick(0, 2);
      for (int i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += random_expression(rng, depth - 1);
      }
      return out + ")";
    }
    default:
      return random_expression(rng, depth - 1) + " " + kOps[static_cast<std::size_t>(pick(0, 12))] +
             " " + random_expression(rng, depth - 1);
  }
}

std::string parse_print(std::string_view src) {
  TokenBuffer buf = TokenBuffer::from_source(src);
  return ast_to_string(*parse_expression(buf));
}

const Expr& as_expr(const ExprPtr& p) { return *p; }

}  // namespace

TEST_CASE("parse_contract: smallest contract") {
  Contract c = parse_source("contract C { func f() int { return 1 } }");
  CHECK(c.name == "C");
  REQUIRE(c.functions.size() == 1);
  const auto& f = c.functions[0];
  CHECK(f.name == "f");
  CHECK(f.params.empty());
  CHECK(f.return_type == Type::Int);
  REQUIRE(f.body.stmts.size() == 1);
  const auto* ret = std::get_if<ReturnStmt>(&f.body.stmts[0].node);
  REQUIRE(ret != nullptr);
  REQUIRE(ret->value != nullptr);
  const auto* lit = std::get_if<IntLit>(&ret->value->node);
  REQUIRE(lit != nullptr);
  CHECK(lit->value == 1);
}

TEST_CASE("parse_contract: a contract needs a function") {
  try {
    (void)parse_source("contract C { }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(!e.diagnostics().empty());
    CHECK(e.diagnostics()[0].message.find("expected 'func'") != std::string::npos);
  }
}

TEST_CASE("parse_contract: loops are unrepresentable") {
  try {
    (void)parse_source("contract C { func f() int { while (x) {} } }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(!e.diagnostics().empty());
    // Reported at `while`.
    CHECK(e.diagnostics()[0].line == 1);
    CHECK(e.diagnostics()[0].col == 29);
  }
}

TEST_CASE("parse_contract: recovery reports errors in several functions") {
  const char* src =
      "contract C {\n"
      "  func a() int { return 1 + }\n"
      "  func b() int { return 2 }\n"
      "  func c() int { let = 3 }\n"
      "}\n";
  try {
    (void)parse_source(src);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.diagnostics().size() == 2);
    CHECK(e.diagnostics()[0].line == 2);
    CHECK(e.diagnostics()[1].line == 4);
  }
}

TEST_CASE("parse_expression: precedence examples") {
  CHECK(parse_print("1 + 2 * 3") == "(1 + (2 * 3))");
  CHECK(parse_print("x") == "x");
  CHECK(parse_print("-a + b") == "((-a) + b)");
  CHECK(parse_print("a == b && c == d") == "((a == b) && (c == d))");
  CHECK(parse_print("a || b && c") == "(a || (b && c))");
  CHECK(parse_print("(1 + 2) * 3") == "((1 + 2) * 3)");
  CHECK(parse_print("f(1, g(2) + 3)") == "f(1, (g(2) + 3))");

  TokenBuffer buf = TokenBuffer::from_source("1 + 2 * 3");
  ExprPtr e = parse_expression(buf);
  const auto* add = std::get_if<Infix>(&e->node);
  REQUIRE(add != nullptr);
  CHECK(add->op == InfixOp::Add);
  CHECK(std::get<IntLit>(add->left->node).value == 1);
  const auto* mul = std::get_if<Infix>(&add->right->node);
  REQUIRE(mul != nullptr);
  CHECK(mul->op == InfixOp::Mul);
}

TEST_CASE("parse_expression: left associativity") {
  for (const char* op : {"-", "+", "*", "/", "%", "==", "!=", "<", "<=", ">", ">=", "&&", "||"}) {
    CHECK(parse_print(fmt::format("a {0} b {0} c", op)) == fmt::format("((a {0} b) {0} c)", op));
  }
}

TEST_CASE("ast_to_string: canonical forms") {
  auto add = make_expr(Infix{InfixOp::Add, make_expr(IntLit{1}), make_expr(IntLit{2})});
  CHECK(ast_to_string(*add) == "(1 + 2)");
  auto no = make_expr(Prefix{PrefixOp::Not, make_expr(BoolLit{true})});
  CHECK(ast_to_string(*no) == "(!true)");
}

TEST_CASE("Pratt parse agrees with precedence climbing on random expressions") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 3000; ++i) {
    std::string src = random_expression(rng, 5);
    ClimbingOracle oracle(tokenize(src));
    std::string expected = oracle.parse();
    INFO(src);
    CHECK(parse_print(src) == expected);
  }
}

TEST_CASE("print then reparse is a fixpoint") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    std::string src = random_expression(rng, 5);
    TokenBuffer buf = TokenBuffer::from_source(src);
    ExprPtr e = parse_expression(buf);
    std::string printed = ast_to_string(*e);
    TokenBuffer again = TokenBuffer::from_source(printed);
    ExprPtr e2 = parse_expression(again);
    INFO(src);
    CHECK(same_structure(as_expr(e), as_expr(e2)));
  }
}

TEST_CASE("contract print then reparse is a fixpoint") {
  koa::testing::Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    auto prog = koa::testing::generate_program(rng);
    Contract c = parse_source(prog.source);
    Contract again = parse_source(ast_to_string(c));
    INFO(prog.source);
    CHECK(same_structure(c, again));
  }
}

TEST_CASE("invalid sources produce positioned errors, never crashes") {
  koa::testing::Rng rng(11);
  int rejected = 0;
  for (int i = 0; i < 300; ++i) {
    std::string src = koa::testing::generate_program(rng).source;
    // Delete one random token-ish character to break the syntax.
    std::size_t cut = std::uniform_int_distribution<std::size_t>(0, src.size() - 1)(rng);
    src.erase(cut, 1);
    try {
      (void)parse_source(src);
    } catch (const SourceError& e) {
      ++rejected;
      for (const auto& d : e.diagnostics()) {
        int lines = 1 + static_cast<int>(std::count(src.begin(), src.end(), '\n'));
        CHECK(d.line >= 1);
        CHECK(d.line <= lines);
        CHECK(d.col >= 1);
      }
    }
  }
  CHECK(rejected > 0);
}

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

#ifndef KOA_AST_HPP
#define KOA_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "koa/diagnostics.hpp"

namespace koa {

/// Value types. The numeric values double as the ABI type tags.
enum class Type : std::uint8_t { Int = 0, Bool = 1, String = 2, Void = 255 };

std::string_view to_string(Type type);

enum class PrefixOp { Neg, Not };
enum class InfixOp { Add, Sub, Mul, Div, Mod, Eq, NotEq, Lt, Lte, Gt, Gte, And, Or };

std::string_view symbol(PrefixOp op);
std::string_view symbol(InfixOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
  std::int64_t value = 0;
};
struct BoolLit {
  bool value = false;
};
struct StrLit {
  std::string value;
};
struct Ident {
  std::string name;
};
struct Prefix {
  PrefixOp op;
  ExprPtr operand;
};
struct Infix {
  InfixOp op;
  ExprPtr left;
  ExprPtr right;
};
struct Call {
  std::string callee;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<IntLit, BoolLit, StrLit, Ident, Prefix, Infix, Call> node;
  SourcePos pos;
  std::optional<Type> type;  // filled in by typecheck
};

ExprPtr make_expr(decltype(Expr::node) node, SourcePos pos = {});

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
};

struct LetStmt {
  std::string name;
  Type declared = Type::Int;
  ExprPtr init;
};
struct AssignStmt {
  std::string name;
  ExprPtr value;
};
struct IfStmt {
  ExprPtr cond;
  Block then_block;
  std::optional<Block> else_block;
};
struct ReturnStmt {
  ExprPtr value;  // null for a bare `return`
};
struct ExprStmt {
  ExprPtr expr;
};

struct Stmt {
  std::variant<LetStmt, AssignStmt, IfStmt, ReturnStmt, ExprStmt> node;
  SourcePos pos;
};

struct Param {
  std::string name;
  Type type = Type::Int;
  SourcePos pos;
};

struct FunctionDecl {
  std::string name;
  std::vector<Param> params;
  Type return_type = Type::Void;
  Block body;
  SourcePos pos;
};

struct Contract {
  std::string name;
  std::vector<FunctionDecl> functions;
  SourcePos pos;

  [[nodiscard]] const FunctionDecl* find(std::string_view fn) const;
};

/// Structural equality; ignores positions and type annotations.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Stmt& a, const Stmt& b);
bool same_structure(const Block& a, const Block& b);
bool same_structure(const Contract& a, const Contract& b);

/// Canonical rendering. Expressions are fully parenthesized, e.g.
/// `(1 + (2 * 3))`; a contract renders as reparseable Koa source.
std::string ast_to_string(const Expr& expr);
std::string ast_to_string(const Stmt& stmt, int indent = 0);
std::string ast_to_string(const Contract& contract);

/// Whether control can never fall out of the end of `block`: it ends in a
/// return, or in an if/else whose branches both end that way.
bool always_returns(const Block& block);
bool always_returns(const Stmt& stmt);

}  // namespace koa

#endif  // KOA_AST_HPP

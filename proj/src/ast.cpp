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

#include "koa/ast.hpp"

#include <fmt/core.h>

#include "koa/lexer.hpp"

namespace koa {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view to_string(Type type) {
  switch (type) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::String: return "string";
    case Type::Void: return "void";
  }
  return "?";
}

std::string_view symbol(PrefixOp op) { return op == PrefixOp::Neg ? "-" : "!"; }

std::string_view symbol(InfixOp op) {
  switch (op) {
    case InfixOp::Add: return "+";
    case InfixOp::Sub: return "-";
    case InfixOp::Mul: return "*";
    case InfixOp::Div: return "/";
    case InfixOp::Mod: return "%";
    case InfixOp::Eq: return "==";
    case InfixOp::NotEq: return "!=";
    case InfixOp::Lt: return "<";
    case InfixOp::Lte: return "<=";
    case InfixOp::Gt: return ">";
    case InfixOp::Gte: return ">=";
    case InfixOp::And: return "&&";
    case InfixOp::Or: return "||";
  }
  return "?";
}

ExprPtr make_expr(decltype(Expr::node) node, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->node = std::move(node);
  e->pos = pos;
  return e;
}

const FunctionDecl* Contract::find(std::string_view fn) const {
  for (const auto& f : functions) {
    if (f.name == fn) return &f;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Structural equality

bool same_structure(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const IntLit& x) { return x.value == std::get<IntLit>(b.node).value; },
          [&](const BoolLit& x) { return x.value == std::get<BoolLit>(b.node).value; },
          [&](const StrLit& x) { return x.value == std::get<StrLit>(b.node).value; },
          [&](const Ident& x) { return x.name == std::get<Ident>(b.node).name; },
          [&](const Prefix& x) {
            const auto& y = std::get<Prefix>(b.node);
            return x.op == y.op && same_structure(*x.operand, *y.operand);
          },
          [&](const Infix& x) {
            const auto& y = std::get<Infix>(b.node);
            return x.op == y.op && same_structure(*x.left, *y.left) &&
                   same_structure(*x.right, *y.right);
          },
          [&](const Call& x) {
            const auto& y = std::get<Call>(b.node);
            if (x.callee != y.callee || x.args.size() != y.args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i) {
              if (!same_structure(*x.args[i], *y.args[i])) return false;
            }
            return true;
          },
      },
      a.node);
}

namespace {

bool same_opt(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

}  // namespace

bool same_structure(const Block& a, const Block& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i) {
    if (!same_structure(a.stmts[i], b.stmts[i])) return false;
  }
  return true;
}

bool same_structure(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const LetStmt& x) {
            const auto& y = std::get<LetStmt>(b.node);
            return x.name == y.name && x.declared == y.declared && same_opt(x.init, y.init);
          },
          [&](const AssignStmt& x) {
            const auto& y = std::get<AssignStmt>(b.node);
            return x.name == y.name && same_opt(x.value, y.value);
          },
          [&](const IfStmt& x) {
            const auto& y = std::get<IfStmt>(b.node);
            if (!same_opt(x.cond, y.cond) || !same_structure(x.then_block, y.then_block)) {
              return false;
            }
            if (x.else_block.has_value() != y.else_block.has_value()) return false;
            return !x.else_block || same_structure(*x.else_block, *y.else_block);
          },
          [&](const ReturnStmt& x) { return same_opt(x.value, std::get<ReturnStmt>(b.node).value); },
          [&](const ExprStmt& x) { return same_opt(x.expr, std::get<ExprStmt>(b.node).expr); },
      },
      a.node);
}

bool same_structure(const Contract& a, const Contract& b) {
  if (a.name != b.name || a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& f = a.functions[i];
    const auto& g = b.functions[i];
    if (f.name != g.name || f.return_type != g.return_type ||
        f.params.size() != g.params.size()) {
      return false;
    }
    for (std::size_t p = 0; p < f.params.size(); ++p) {
      if (f.params[p].name != g.params[p].name || f.params[p].type != g.params[p].type) {
        return false;
      }
    }
    if (!same_structure(f.body, g.body)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing

std::string ast_to_string(const Expr& expr) {
  return std::visit(
      overloaded{
          [](const IntLit& x) { return std::to_string(x.value); },
          [](const BoolLit& x) { return std::string(x.value ? "true" : "false"); },
          [](const StrLit& x) { return quote_string(x.value); },
          [](const Ident& x) { return x.name; },
          [](const Prefix& x) {
            return fmt::format("({}{})", symbol(x.op), ast_to_string(*x.operand));
          },
          [](const Infix& x) {
            return fmt::format("({} {} {})", ast_to_string(*x.left), symbol(x.op),
                               ast_to_string(*x.right));
          },
          [](const Call& x) {
            std::string out = x.callee + "(";
            for (std::size_t i = 0; i < x.args.size(); ++i) {
              if (i) out += ", ";
              out += ast_to_string(*x.args[i]);
            }
            return out + ")";
          },
      },
      expr.node);
}

namespace {

void print_block(std::string& out, const Block& block, int indent) {
  out += "{\n";
  for (const auto& s : block.stmts) out += ast_to_string(s, indent + 1);
  out += std::string(static_cast<std::size_t>(indent) * 2, ' ') + "}";
}

}  // namespace

std::string ast_to_string(const Stmt& stmt, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::string out = pad;
  std::visit(overloaded{
                 [&](const LetStmt& x) {
                   out += fmt::format("let {} {} = {}", x.name, to_string(x.declared),
                                      ast_to_string(*x.init));
                 },
                 [&](const AssignStmt& x) {
                   out += fmt::format("{} = {}", x.name, ast_to_string(*x.value));
                 },
                 [&](const IfStmt& x) {
                   bool bare = std::holds_alternative<Prefix>(x.cond->node) ||
                               std::holds_alternative<Infix>(x.cond->node);
                   out += bare ? fmt::format("if {} ", ast_to_string(*x.cond))
                               : fmt::format("if ({}) ", ast_to_string(*x.cond));
                   print_block(out, x.then_block, indent);
                   if (x.else_block) {
                     out += " else ";
                     print_block(out, *x.else_block, indent);
                   }
                 },
                 [&](const ReturnStmt& x) {
                   out += "return";
                   if (x.value) out += " " + ast_to_string(*x.value);
                 },
                 [&](const ExprStmt& x) { out += ast_to_string(*x.expr); },
             },
             stmt.node);
  out += "\n";
  return out;
}

std::string ast_to_string(const Contract& contract) {
  std::string out = fmt::format("contract {} {{\n", contract.name);
  for (const auto& f : contract.functions) {
    out += fmt::format("  func {}(", f.name);
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ", ";
      out += fmt::format("{} {}", f.params[i].name, to_string(f.params[i].type));
    }
    out += ")";
    if (f.return_type != Type::Void) out += fmt::format(" {}", to_string(f.return_type));
    out += " ";
    print_block(out, f.body, 1);
    out += "\n";
  }
  out += "}\n";
  return out;
}

bool always_returns(const Stmt& stmt) {
  if (std::holds_alternative<ReturnStmt>(stmt.node)) return true;
  if (const auto* s = std::get_if<IfStmt>(&stmt.node)) {
    return s->else_block && always_returns(s->then_block) && always_returns(*s->else_block);
  }
  return false;
}

bool always_returns(const Block& block) {
  for (const auto& s : block.stmts) {
    if (always_returns(s)) return true;
  }
  return false;
}

}  // namespace koa

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

#include "koa/typecheck.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include <fmt/core.h>

namespace koa {

std::size_t TypedContract::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < ast.functions.size(); ++i) {
    if (ast.functions[i].name == name) return i;
  }
  return ast.functions.size();
}

namespace {

class Checker {
 public:
  explicit Checker(Contract& contract) : contract_(contract) {
    for (std::size_t i = 0; i < contract.functions.size(); ++i) {
      index_.emplace(contract.functions[i].name, i);
    }
    callees_.resize(contract.functions.size());
  }

  void run() {
    for (std::size_t i = 0; i < contract_.functions.size(); ++i) {
      current_ = i;
      check_function(contract_.functions[i]);
    }
  }

  std::vector<Diagnostic> errors;
  std::vector<std::vector<std::size_t>> callees_;

 private:
  using Scope = std::map<std::string, Type, std::less<>>;

  void error(SourcePos pos, std::string message) {
    errors.push_back({Stage::Type, pos.line, pos.col, std::move(message)});
  }

  void mismatch(SourcePos pos, Type expected, Type found) {
    error(pos, fmt::format("expected {}, found {}", to_string(expected), to_string(found)));
  }

  const Type* lookup(std::string_view name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  void check_function(FunctionDecl& fn) {
    fn_ = &fn;
    scopes_.clear();
    scopes_.emplace_back();
    for (const auto& p : fn.params) scopes_.back().emplace(p.name, p.type);
    check_block(fn.body);
    if (fn.return_type != Type::Void && !always_returns(fn.body)) {
      error(fn.pos, "missing return on some path");
    }
  }

  void check_block(Block& block) {
    scopes_.emplace_back();
    for (auto& s : block.stmts) check_stmt(s);
    scopes_.pop_back();
  }

  void check_stmt(Stmt& stmt) {
    if (auto* let = std::get_if<LetStmt>(&stmt.node)) {
      auto t = check_value(*let->init);
      if (t && *t != let->declared) mismatch(let->init->pos, let->declared, *t);
      if (lookup(let->name) != nullptr) {
        error(stmt.pos, fmt::format("variable '{}' already declared", let->name));
      } else {
        scopes_.back().emplace(let->name, let->declared);
      }
    } else if (auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
      auto t = check_value(*assign->value);
      const Type* var = lookup(assign->name);
      if (var == nullptr) {
        error(stmt.pos, fmt::format("undefined variable '{}'", assign->name));
      } else if (t && *t != *var) {
        mismatch(assign->value->pos, *var, *t);
      }
    } else if (auto* s = std::get_if<IfStmt>(&stmt.node)) {
      auto t = check_value(*s->cond);
      if (t && *t != Type::Bool) mismatch(s->cond->pos, Type::Bool, *t);
      check_block(s->then_block);
      if (s->else_block) check_block(*s->else_block);
    } else if (auto* ret = std::get_if<ReturnStmt>(&stmt.node)) {
      if (ret->value) {
        auto t = check_value(*ret->value);
        if (fn_->return_type == Type::Void) {
          error(ret->value->pos,
                fmt::format("function '{}' does not return a value", fn_->name));
        } else if (t && *t != fn_->return_type) {
          mismatch(ret->value->pos, fn_->return_type, *t);
        }
      } else if (fn_->return_type != Type::Void) {
        error(stmt.pos, fmt::format("expected {}, found no value",
                                    to_string(fn_->return_type)));
      }
    } else if (auto* e = std::get_if<ExprStmt>(&stmt.node)) {
      check_expr(*e->expr);
    }
  }

  /// Like check_expr but rejects void calls in value position.
  std::optional<Type> check_value(Expr& expr) {
    auto t = check_expr(expr);
    if (t == Type::Void) {
      error(expr.pos, "expression has no value");
      return std::nullopt;
    }
    return t;
  }

  std::optional<Type> expect_operand(Expr& expr, Type want) {
    auto t = check_value(expr);
    if (t && *t != want) {
      mismatch(expr.pos, want, *t);
      return std::nullopt;
    }
    return t;
  }

  std::optional<Type> check_expr(Expr& expr) {
    std::optional<Type> t = std::visit([&](auto& node) { return check_node(expr, node); },
                                       expr.node);
    expr.type = t;
    return t;
  }

  std::optional<Type> check_node(Expr&, IntLit&) { return Type::Int; }
  std::optional<Type> check_node(Expr&, BoolLit&) { return Type::Bool; }
  std::optional<Type> check_node(Expr&, StrLit&) { return Type::String; }

  std::optional<Type> check_node(Expr& expr, Ident& id) {
    const Type* t = lookup(id.name);
    if (t == nullptr) {
      error(expr.pos, fmt::format("undefined variable '{}'", id.name));
      return std::nullopt;
    }
    return *t;
  }

  std::optional<Type> check_node(Expr&, Prefix& p) {
    Type want = p.op == PrefixOp::Neg ? Type::Int : Type::Bool;
    if (!expect_operand(*p.operand, want)) return std::nullopt;
    return want;
  }

  std::optional<Type> check_node(Expr& expr, Infix& in) {
    switch (in.op) {
      case InfixOp::Add:
      case InfixOp::Sub:
      case InfixOp::Mul:
      case InfixOp::Div:
      case InfixOp::Mod: {
        auto l = expect_operand(*in.left, Type::Int);
        auto r = expect_operand(*in.right, Type::Int);
        if (!l || !r) return std::nullopt;
        return Type::Int;
      }
      case InfixOp::Lt:
      case InfixOp::Lte:
      case InfixOp::Gt:
      case InfixOp::Gte: {
        auto l = expect_operand(*in.left, Type::Int);
        auto r = expect_operand(*in.right, Type::Int);
        if (!l || !r) return std::nullopt;
        return Type::Bool;
      }
      case InfixOp::And:
      case InfixOp::Or: {
        auto l = expect_operand(*in.left, Type::Bool);
        auto r = expect_operand(*in.right, Type::Bool);
        if (!l || !r) return std::nullopt;
        return Type::Bool;
      }
      case InfixOp::Eq:
      case InfixOp::NotEq: {
        auto l = check_value(*in.left);
        auto r = check_value(*in.right);
        if (!l || !r) return std::nullopt;
        if (*l != *r) {
          error(expr.pos, fmt::format("cannot compare {} with {}", to_string(*l),
                                      to_string(*r)));
          return std::nullopt;
        }
        return Type::Bool;
      }
    }
    return std::nullopt;
  }

  std::optional<Type> check_node(Expr& expr, Call& call) {
    auto it = index_.find(call.callee);
    if (it == index_.end()) {
      for (auto& a : call.args) check_value(*a);
      error(expr.pos, fmt::format("undefined function '{}'", call.callee));
      return std::nullopt;
    }
    auto& edges = callees_[current_];
    if (std::find(edges.begin(), edges.end(), it->second) == edges.end()) {
      edges.push_back(it->second);
    }
    const FunctionDecl& target = contract_.functions[it->second];
    bool ok = true;
    if (call.args.size() != target.params.size()) {
      error(expr.pos, fmt::format("function '{}' expects {} argument(s), found {}",
                                  call.callee, target.params.size(), call.args.size()));
      ok = false;
    }
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      auto t = check_value(*call.args[i]);
      if (t && i < target.params.size() && *t != target.params[i].type) {
        error(call.args[i]->pos,
              fmt::format("argument {} of '{}': expected {}, found {}", i + 1, call.callee,
                          to_string(target.params[i].type), to_string(*t)));
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return target.return_type;
  }

  Contract& contract_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<Scope> scopes_;
  const FunctionDecl* fn_ = nullptr;
  std::size_t current_ = 0;
};

}  // namespace

TypedContract typecheck(Contract contract) {
  Checker checker(contract);
  checker.run();
  if (!checker.errors.empty()) throw TypeError(std::move(checker.errors));
  return TypedContract{std::move(contract), std::move(checker.callees_)};
}

void detect_recursion(const TypedContract& contract) {
  const std::size_t n = contract.ast.functions.size();
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(n, Mark::White);
  std::vector<std::size_t> stack;

  // Iterative DFS; `stack` mirrors the grey path.
  for (std::size_t root = 0; root < n; ++root) {
    if (mark[root] != Mark::White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
    mark[root] = Mark::Grey;
    stack.push_back(root);
    while (!frames.empty()) {
      auto& [node, edge] = frames.back();
      const auto& out = contract.callees[node];
      if (edge == out.size()) {
        mark[node] = Mark::Black;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      std::size_t next = out[edge++];
      if (mark[next] == Mark::Grey) {
        auto from = std::find(stack.begin(), stack.end(), next);
        std::vector<std::string> cycle;
        for (auto it = from; it != stack.end(); ++it) {
          cycle.push_back(contract.ast.functions[*it].name);
        }
        cycle.push_back(contract.ast.functions[next].name);
        throw CycleError(std::move(cycle), contract.ast.functions[next].pos);
      }
      if (mark[next] == Mark::White) {
        mark[next] = Mark::Grey;
        stack.push_back(next);
        frames.emplace_back(next, 0);
      }
    }
  }
}

std::vector<std::size_t> topological_order(const TypedContract& contract) {
  const std::size_t n = contract.ast.functions.size();
  std::vector<bool> done(n, false);
  std::vector<std::size_t> order;
  // Post-order DFS; the graph is known to be acyclic.
  auto visit = [&](auto&& self, std::size_t f) -> void {
    if (done[f]) return;
    done[f] = true;
    for (std::size_t c : contract.callees[f]) self(self, c);
    order.push_back(f);
  };
  for (std::size_t f = 0; f < n; ++f) visit(visit, f);
  return order;
}

}  // namespace koa

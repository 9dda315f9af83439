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

#include "koa/reference.hpp"

#include <limits>
#include <map>
#include <optional>

#include <fmt/core.h>

namespace koa {

namespace {

class Interpreter {
 public:
  explicit Interpreter(const TypedContract& tc) : tc_(tc) {}

  Value call(const FunctionDecl& fn, std::vector<Value> args) {
    Env env;
    env.emplace_back();
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      env.back()[fn.params[i].name] = std::move(args[i]);
    }
    std::optional<Value> ret = block(env, fn.body);
    return ret ? std::move(*ret) : Value{};
  }

 private:
  using Env = std::vector<std::map<std::string, Value, std::less<>>>;

  static Value& lookup(Env& env, std::string_view name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    throw std::logic_error(fmt::format("unbound '{}'", name));
  }

  /// Returns the value of a `return` that unwinds through this block.
  std::optional<Value> block(Env& env, const Block& b) {
    env.emplace_back();
    std::optional<Value> out;
    for (const auto& s : b.stmts) {
      out = stmt(env, s);
      if (out) break;
    }
    env.pop_back();
    return out;
  }

  std::optional<Value> stmt(Env& env, const Stmt& s) {
    if (const auto* let = std::get_if<LetStmt>(&s.node)) {
      Value v = eval(env, *let->init);
      env.back()[let->name] = std::move(v);
    } else if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
      Value v = eval(env, *a->value);
      lookup(env, a->name) = std::move(v);
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      if (std::get<bool>(eval(env, *i->cond))) return block(env, i->then_block);
      if (i->else_block) return block(env, *i->else_block);
    } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
      return r->value ? eval(env, *r->value) : Value{};
    } else if (const auto* e = std::get_if<ExprStmt>(&s.node)) {
      eval(env, *e->expr);
    }
    return std::nullopt;
  }

  static std::int64_t arith(InfixOp op, std::int64_t l, std::int64_t r) {
    using U = std::uint64_t;
    switch (op) {
      case InfixOp::Add: return static_cast<std::int64_t>(U(l) + U(r));
      case InfixOp::Sub: return static_cast<std::int64_t>(U(l) - U(r));
      case InfixOp::Mul: return static_cast<std::int64_t>(U(l) * U(r));
      case InfixOp::Div:
      case InfixOp::Mod:
        if (r == 0) throw RuntimeError(VmErrorKind::DivideByZero, "divide by zero");
        if (r == -1) {
          // x / -1 == -x and x % -1 == 0, with INT64_MIN wrapping.
          return op == InfixOp::Div ? static_cast<std::int64_t>(U(0) - U(l)) : 0;
        }
        return op == InfixOp::Div ? l / r : l % r;
      default: break;
    }
    throw std::logic_error("not arithmetic");
  }

  Value eval(Env& env, const Expr& e) {
    if (const auto* x = std::get_if<IntLit>(&e.node)) return x->value;
    if (const auto* x = std::get_if<BoolLit>(&e.node)) return x->value;
    if (const auto* x = std::get_if<StrLit>(&e.node)) return x->value;
    if (const auto* x = std::get_if<Ident>(&e.node)) return lookup(env, x->name);
    if (const auto* x = std::get_if<Prefix>(&e.node)) {
      Value v = eval(env, *x->operand);
      if (x->op == PrefixOp::Not) return !std::get<bool>(v);
      return static_cast<std::int64_t>(std::uint64_t{0} -
                                       static_cast<std::uint64_t>(std::get<std::int64_t>(v)));
    }
    if (const auto* x = std::get_if<Infix>(&e.node)) return infix(env, *x);
    const auto& c = std::get<Call>(e.node);
    std::vector<Value> args;
    for (const auto& a : c.args) args.push_back(eval(env, *a));
    return call(tc_.ast.functions.at(tc_.index_of(c.callee)), std::move(args));
  }

  Value infix(Env& env, const Infix& x) {
    if (x.op == InfixOp::And) {
      if (!std::get<bool>(eval(env, *x.left))) return false;
      return std::get<bool>(eval(env, *x.right));
    }
    if (x.op == InfixOp::Or) {
      if (std::get<bool>(eval(env, *x.left))) return true;
      return std::get<bool>(eval(env, *x.right));
    }
    Value l = eval(env, *x.left);
    Value r = eval(env, *x.right);
    switch (x.op) {
      case InfixOp::Eq: return l == r;
      case InfixOp::NotEq: return l != r;
      case InfixOp::Lt: return std::get<std::int64_t>(l) < std::get<std::int64_t>(r);
      case InfixOp::Lte: return std::get<std::int64_t>(l) <= std::get<std::int64_t>(r);
      case InfixOp::Gt: return std::get<std::int64_t>(l) > std::get<std::int64_t>(r);
      case InfixOp::Gte: return std::get<std::int64_t>(l) >= std::get<std::int64_t>(r);
      default: return arith(x.op, std::get<std::int64_t>(l), std::get<std::int64_t>(r));
    }
  }

  const TypedContract& tc_;
};

}  // namespace

Value interpret_reference(const TypedContract& contract, std::string_view function,
                          const std::vector<Value>& args) {
  const FunctionDecl* fn = contract.ast.find(function);
  if (fn == nullptr) {
    throw RuntimeError(VmErrorKind::UnknownSelector,
                       fmt::format("unknown function '{}'", function));
  }
  if (args.size() != fn->params.size()) {
    throw RuntimeError(VmErrorKind::ArityOrTypeMismatch, "argument count mismatch");
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (type_of(args[i]) != fn->params[i].type) {
      throw RuntimeError(VmErrorKind::ArityOrTypeMismatch, "argument type mismatch");
    }
  }
  return Interpreter(contract).call(*fn, args);
}

}  // namespace koa

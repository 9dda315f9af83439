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

#include "koa/codegen.hpp"

#include <limits>
#include <map>
#include <set>

#include <fmt/core.h>

namespace koa {

namespace {

constexpr std::uint32_t kMemorySlots = 65536;

/// Instruction with an unresolved jump label, or a label marker.
struct IrIns {
  Opcode op = Opcode::HALT;
  std::uint64_t imm = 0;
  int label = -1;        // jump target label
  bool is_label = false; // marker: `label` is placed here
};

struct VarLoc {
  bool is_arg = false;
  std::uint32_t index = 0;
};

struct Frame {
  std::vector<std::map<std::string, VarLoc, std::less<>>> scopes;
  int return_label = -1;

  const VarLoc& find(std::string_view name) const {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    throw std::logic_error(fmt::format("unbound variable '{}' after typecheck", name));
  }
};

void collect_assigned(const Block& block, std::set<std::string>& out) {
  for (const auto& s : block.stmts) {
    if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
      out.insert(a->name);
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      collect_assigned(i->then_block, out);
      if (i->else_block) collect_assigned(*i->else_block, out);
    }
  }
}

class Codegen {
 public:
  explicit Codegen(const TypedContract& tc) : tc_(tc) {}

  Container run() {
    std::map<Selector, std::string> seen;
    for (std::size_t i = 0; i < tc_.ast.functions.size(); ++i) {
      const FunctionDecl& fn = tc_.ast.functions[i];
      std::vector<Type> params;
      for (const auto& p : fn.params) params.push_back(p.type);
      FunctionAbi abi;
      abi.selector = selector(fn.name, params);
      abi.name = fn.name;
      abi.params = std::move(params);
      abi.return_type = fn.return_type;
      if (auto [it, fresh] = seen.emplace(abi.selector, fn.name); !fresh) {
        throw CompileError(fmt::format("selector collision between '{}' and '{}'", it->second,
                                       fn.name),
                           fn.pos);
      }
      abi.code_offset = static_cast<std::uint32_t>(out_.code.size());
      compile_region(fn);
      abi.code_length = static_cast<std::uint32_t>(out_.code.size()) - abi.code_offset;
      out_.functions.push_back(std::move(abi));
    }
    return std::move(out_);
  }

 private:
  // --- emission helpers ---------------------------------------------------

  void emit(Opcode op, std::uint64_t imm = 0) { ir_.push_back({op, imm, -1, false}); }
  void emit_jump(Opcode op, int label) { ir_.push_back({op, 0, label, false}); }
  int new_label() { return next_label_++; }
  void place(int label) { ir_.push_back({Opcode::HALT, 0, label, true}); }

  std::uint32_t new_slot(SourcePos pos) {
    if (next_slot_ >= kMemorySlots) {
      throw CompileError("memory slot limit (65536) exceeded after inlining", pos);
    }
    return next_slot_++;
  }

  std::uint32_t constant(const std::string& s) {
    auto [it, fresh] = constants_.emplace(s, static_cast<std::uint32_t>(out_.constants.size()));
    if (fresh) out_.constants.push_back(s);
    return it->second;
  }

  // --- regions ------------------------------------------------------------

  void compile_region(const FunctionDecl& fn) {
    ir_.clear();
    next_label_ = 0;
    next_slot_ = 0;
    frames_.clear();

    Frame frame;
    frame.scopes.emplace_back();
    std::set<std::string> assigned;
    collect_assigned(fn.body, assigned);
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      const auto& p = fn.params[i];
      if (assigned.contains(p.name)) {
        std::uint32_t slot = new_slot(p.pos);
        emit(Opcode::LOADARG, i);
        emit(Opcode::MSTORE, slot);
        frame.scopes.back()[p.name] = VarLoc{false, slot};
      } else {
        frame.scopes.back()[p.name] = VarLoc{true, static_cast<std::uint32_t>(i)};
      }
    }
    // Every return jumps to one exit; a jump that lands on the next
    // instruction disappears in resolve().
    frame.return_label = new_label();
    frames_.push_back(std::move(frame));
    gen_block(fn.body);
    place(frames_.back().return_label);
    emit(fn.return_type == Type::Void ? Opcode::HALT : Opcode::RETURN);
    frames_.pop_back();
    resolve();
  }

  /// Drops jumps to the next instruction (JUMPF becomes POP), then assigns
  /// offsets and encodes.
  void resolve() {
    for (bool changed = true; changed;) {
      changed = false;
      std::map<int, std::size_t> where;
      for (std::size_t k = 0; k < ir_.size(); ++k) {
        if (ir_[k].is_label) where[ir_[k].label] = k;
      }
      std::vector<IrIns> kept;
      kept.reserve(ir_.size());
      for (std::size_t k = 0; k < ir_.size(); ++k) {
        IrIns ins = ir_[k];
        if (!ins.is_label && is_jump(ins.op)) {
          std::size_t target = where.at(ins.label);
          bool to_next = target > k;
          for (std::size_t m = k + 1; to_next && m < target; ++m) {
            if (!ir_[m].is_label) to_next = false;
          }
          if (to_next) {
            changed = true;
            if (ins.op == Opcode::JUMP) continue;
            ins = {Opcode::POP, 0, -1, false};
          }
        }
        kept.push_back(ins);
      }
      ir_ = std::move(kept);
    }

    const auto base = static_cast<std::uint64_t>(out_.code.size());
    std::map<int, std::uint64_t> offset;
    std::uint64_t pc = base;
    for (const auto& ins : ir_) {
      if (ins.is_label) {
        offset[ins.label] = pc;
      } else {
        pc += instruction_size(ins.op);
      }
    }
    if (pc > std::numeric_limits<std::uint32_t>::max()) {
      throw CompileError("code section exceeds 4 GiB");
    }
    for (const auto& ins : ir_) {
      if (ins.is_label) continue;
      encode_instruction(out_.code, ins.op, is_jump(ins.op) ? offset.at(ins.label) : ins.imm);
    }
  }

  // --- statements -----------------------------------------------------------

  Frame& frame() { return frames_.back(); }

  // Slots are allocated like a stack: whatever a block or an inlined body
  // declared is dead once it ends, so the slots are handed out again.
  void gen_block(const Block& block) {
    const std::uint32_t mark = next_slot_;
    frame().scopes.emplace_back();
    for (const auto& s : block.stmts) {
      gen_stmt(s);
      if (always_returns(s)) break;  // the rest is unreachable
    }
    frame().scopes.pop_back();
    next_slot_ = mark;
  }

  void gen_stmt(const Stmt& stmt) {
    if (const auto* let = std::get_if<LetStmt>(&stmt.node)) {
      gen_expr(*let->init);
      std::uint32_t slot = new_slot(stmt.pos);
      emit(Opcode::MSTORE, slot);
      frame().scopes.back()[let->name] = VarLoc{false, slot};
    } else if (const auto* assign = std::get_if<AssignStmt>(&stmt.node)) {
      gen_expr(*assign->value);
      const VarLoc& loc = frame().find(assign->name);
      if (loc.is_arg) throw std::logic_error("assignment to an unspilled parameter");
      emit(Opcode::MSTORE, loc.index);
    } else if (const auto* s = std::get_if<IfStmt>(&stmt.node)) {
      gen_expr(*s->cond);
      if (!s->else_block) {
        int end = new_label();
        emit_jump(Opcode::JUMPF, end);
        gen_block(s->then_block);
        place(end);
      } else {
        int other = new_label();
        int end = new_label();
        emit_jump(Opcode::JUMPF, other);
        gen_block(s->then_block);
        if (!always_returns(s->then_block)) emit_jump(Opcode::JUMP, end);
        place(other);
        gen_block(*s->else_block);
        place(end);
      }
    } else if (const auto* r = std::get_if<ReturnStmt>(&stmt.node)) {
      if (r->value) gen_expr(*r->value);
      emit_jump(Opcode::JUMP, frame().return_label);
    } else if (const auto* e = std::get_if<ExprStmt>(&stmt.node)) {
      gen_expr(*e->expr);
      if (e->expr->type != Type::Void) emit(Opcode::POP);
    }
  }

  // --- expressions ----------------------------------------------------------

  void gen_expr(const Expr& expr) {
    std::visit([&](const auto& node) { gen(expr, node); }, expr.node);
  }

  void gen(const Expr&, const IntLit& x) { emit(Opcode::PUSH, static_cast<std::uint64_t>(x.value)); }
  void gen(const Expr&, const BoolLit& x) { emit(Opcode::PUSH, x.value ? 1 : 0); }
  void gen(const Expr&, const StrLit& x) { emit(Opcode::SPUSH, constant(x.value)); }

  void gen(const Expr&, const Ident& x) {
    const VarLoc& loc = frame().find(x.name);
    emit(loc.is_arg ? Opcode::LOADARG : Opcode::MLOAD, loc.index);
  }

  void gen(const Expr&, const Prefix& x) {
    gen_expr(*x.operand);
    emit(x.op == PrefixOp::Neg ? Opcode::NEG : Opcode::NOT);
  }

  void gen(const Expr&, const Infix& x) {
    if (x.op == InfixOp::And || x.op == InfixOp::Or) {
      int other = new_label();
      int end = new_label();
      gen_expr(*x.left);
      emit_jump(Opcode::JUMPF, other);
      if (x.op == InfixOp::And) {
        gen_expr(*x.right);
        emit_jump(Opcode::JUMP, end);
        place(other);
        emit(Opcode::PUSH, 0);
      } else {
        emit(Opcode::PUSH, 1);
        emit_jump(Opcode::JUMP, end);
        place(other);
        gen_expr(*x.right);
      }
      place(end);
      return;
    }
    gen_expr(*x.left);
    gen_expr(*x.right);
    const bool strings = x.left->type == Type::String;
    switch (x.op) {
      case InfixOp::Add: emit(Opcode::ADD); break;
      case InfixOp::Sub: emit(Opcode::SUB); break;
      case InfixOp::Mul: emit(Opcode::MUL); break;
      case InfixOp::Div: emit(Opcode::DIV); break;
      case InfixOp::Mod: emit(Opcode::MOD); break;
      case InfixOp::Lt: emit(Opcode::LT); break;
      case InfixOp::Lte: emit(Opcode::LTE); break;
      case InfixOp::Gt: emit(Opcode::GT); break;
      case InfixOp::Gte: emit(Opcode::GTE); break;
      case InfixOp::Eq: emit(strings ? Opcode::SEQ : Opcode::EQ); break;
      case InfixOp::NotEq:
        if (strings) {
          emit(Opcode::SEQ);
          emit(Opcode::NOT);
        } else {
          emit(Opcode::NEQ);
        }
        break;
      case InfixOp::And:
      case InfixOp::Or: break;
    }
  }

  void gen(const Expr& expr, const Call& call) {
    const std::size_t idx = tc_.index_of(call.callee);
    const FunctionDecl& callee = tc_.ast.functions.at(idx);
    for (const auto& arg : call.args) gen_expr(*arg);

    const std::uint32_t mark = next_slot_;
    Frame inner;
    inner.return_label = new_label();
    inner.scopes.emplace_back();
    std::vector<std::uint32_t> slots;
    for (const auto& p : callee.params) {
      std::uint32_t slot = new_slot(expr.pos);
      slots.push_back(slot);
      inner.scopes.back()[p.name] = VarLoc{false, slot};
    }
    for (auto it = slots.rbegin(); it != slots.rend(); ++it) emit(Opcode::MSTORE, *it);

    frames_.push_back(std::move(inner));
    gen_block(callee.body);
    int done = frame().return_label;
    frames_.pop_back();
    place(done);
    next_slot_ = mark;
  }

  const TypedContract& tc_;
  Container out_;
  std::map<std::string, std::uint32_t> constants_;

  std::vector<IrIns> ir_;
  int next_label_ = 0;
  std::uint32_t next_slot_ = 0;
  std::vector<Frame> frames_;
};

}  // namespace

Container compile(const TypedContract& contract) { return Codegen(contract).run(); }

}  // namespace koa

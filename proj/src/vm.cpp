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

#include "koa/vm.hpp"

#include <limits>
#include <stdexcept>

#include <fmt/core.h>

namespace koa {

Type type_of(const Value& v) {
  switch (v.index()) {
    case 1: return Type::Int;
    case 2: return Type::Bool;
    case 3: return Type::String;
    default: return Type::Void;
  }
}

std::string render_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return "";
}

GasSchedule::GasSchedule() {
  costs_.fill(1);
  costs_[static_cast<std::uint8_t>(Opcode::SPUSH)] = 3;
  costs_[static_cast<std::uint8_t>(Opcode::SEQ)] = 3;
}

void GasSchedule::set(Opcode op, std::uint64_t cost) {
  if (cost == 0) throw std::invalid_argument("gas costs must be positive");
  costs_[static_cast<std::uint8_t>(op)] = cost;
}

std::string_view to_string(VmErrorKind kind) {
  switch (kind) {
    case VmErrorKind::UnknownSelector: return "UnknownSelector";
    case VmErrorKind::ArityOrTypeMismatch: return "ArityOrTypeMismatch";
    case VmErrorKind::DivideByZero: return "DivideByZero";
    case VmErrorKind::OutOfGas: return "OutOfGas";
    case VmErrorKind::StackOverflow: return "StackOverflow";
    case VmErrorKind::StackUnderflow: return "StackUnderflow";
    case VmErrorKind::BadJump: return "BadJump";
    case VmErrorKind::InvalidHandle: return "InvalidHandle";
    case VmErrorKind::InvalidInstruction: return "InvalidInstruction";
  }
  return "?";
}

VmError::VmError(VmErrorKind kind, std::uint32_t offset, std::uint64_t gas_used,
                 std::uint64_t steps, const std::string& message)
    : KoaError(Stage::Vm, message),
      kind_(kind),
      offset_(offset),
      gas_used_(gas_used),
      steps_(steps) {}

std::string format_trace(const TraceEntry& e) {
  return fmt::format("{:04} {} depth={} gas={}", e.offset, opcode_info(e.op).mnemonic, e.depth,
                     e.gas_used);
}

VmState bind_call(const Container& c, const CallData& call) {
  const FunctionAbi* fn = c.find(call.selector);
  if (fn == nullptr) {
    throw VmError(VmErrorKind::UnknownSelector, 0, 0, 0,
                  fmt::format("unknown selector {}", selector_hex(call.selector)));
  }
  if (call.args.size() != fn->params.size()) {
    throw VmError(VmErrorKind::ArityOrTypeMismatch, 0, 0, 0,
                  fmt::format("'{}' expects {} argument(s), got {}", fn->name,
                              fn->params.size(), call.args.size()));
  }
  VmState st;
  st.callfunc = call;
  st.function = fn;
  st.pc = fn->code_offset;
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    const Value& v = call.args[i];
    if (type_of(v) != fn->params[i]) {
      throw VmError(VmErrorKind::ArityOrTypeMismatch, 0, 0, 0,
                    fmt::format("argument {} of '{}': expected {}, got {}", i + 1, fn->name,
                                to_string(fn->params[i]), to_string(type_of(v))));
    }
    if (const auto* n = std::get_if<std::int64_t>(&v)) {
      st.args.push_back(*n);
    } else if (const auto* b = std::get_if<bool>(&v)) {
      st.args.push_back(*b ? 1 : 0);
    } else {
      st.args.push_back(static_cast<Word>(st.heap.size()));
      st.heap.push_back(std::get<std::string>(v));
    }
  }
  return st;
}

namespace {

Word wrap_add(Word a, Word b) {
  return static_cast<Word>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
Word wrap_sub(Word a, Word b) {
  return static_cast<Word>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
Word wrap_mul(Word a, Word b) {
  return static_cast<Word>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class Stepper {
 public:
  Stepper(VmState& st, const Container& c, const Instruction& ins)
      : st_(st), c_(c), ins_(ins) {}

  [[noreturn]] void fail(VmErrorKind kind, const std::string& what) const {
    throw VmError(kind, ins_.offset, st_.gas_used, st_.steps,
                  fmt::format("{} at offset {}", what, ins_.offset));
  }

  Word pop() {
    if (st_.stack.empty()) fail(VmErrorKind::StackUnderflow, "stack underflow");
    Word w = st_.stack.back();
    st_.stack.pop_back();
    return w;
  }

  void push(Word w) {
    if (st_.stack.size() >= kMaxStackDepth) fail(VmErrorKind::StackOverflow, "stack overflow");
    st_.stack.push_back(w);
  }

  Word& slot(std::uint64_t index) {
    if (index >= st_.memory.size()) st_.memory.resize(index + 1, 0);
    return st_.memory[index];
  }

  const std::string& deref(Word handle) const {
    if (handle < 0 || static_cast<std::uint64_t>(handle) >= st_.heap.size()) {
      fail(VmErrorKind::InvalidHandle, "invalid heap handle");
    }
    return st_.heap[static_cast<std::size_t>(handle)];
  }

  void jump(std::uint64_t target) {
    if (target <= ins_.offset || target >= st_.function->code_end()) {
      fail(VmErrorKind::BadJump, "bad jump");
    }
    st_.pc = static_cast<std::uint32_t>(target);
  }

  void run() {
    st_.pc = ins_.next();
    switch (ins_.op) {
      case Opcode::PUSH: push(static_cast<Word>(ins_.imm)); break;
      case Opcode::POP: pop(); break;
      case Opcode::ADD: { Word r = pop(), l = pop(); push(wrap_add(l, r)); break; }
      case Opcode::SUB: { Word r = pop(), l = pop(); push(wrap_sub(l, r)); break; }
      case Opcode::MUL: { Word r = pop(), l = pop(); push(wrap_mul(l, r)); break; }
      case Opcode::DIV:
      case Opcode::MOD: {
        Word r = pop(), l = pop();
        if (r == 0) fail(VmErrorKind::DivideByZero, "divide by zero");
        if (l == std::numeric_limits<Word>::min() && r == -1) {
          push(ins_.op == Opcode::DIV ? l : 0);
        } else {
          push(ins_.op == Opcode::DIV ? l / r : l % r);
        }
        break;
      }
      case Opcode::EQ: { Word r = pop(), l = pop(); push(l == r); break; }
      case Opcode::NEQ: { Word r = pop(), l = pop(); push(l != r); break; }
      case Opcode::LT: { Word r = pop(), l = pop(); push(l < r); break; }
      case Opcode::LTE: { Word r = pop(), l = pop(); push(l <= r); break; }
      case Opcode::GT: { Word r = pop(), l = pop(); push(l > r); break; }
      case Opcode::GTE: { Word r = pop(), l = pop(); push(l >= r); break; }
      case Opcode::AND: { Word r = pop(), l = pop(); push((l != 0) && (r != 0)); break; }
      case Opcode::OR: { Word r = pop(), l = pop(); push((l != 0) || (r != 0)); break; }
      case Opcode::NOT: push(pop() == 0 ? 1 : 0); break;
      case Opcode::NEG: push(wrap_sub(0, pop())); break;
      case Opcode::JUMP: jump(ins_.imm); break;
      case Opcode::JUMPF:
        if (pop() == 0) jump(ins_.imm);
        break;
      case Opcode::MLOAD: push(slot(ins_.imm)); break;
      case Opcode::MSTORE: { Word v = pop(); slot(ins_.imm) = v; break; }
      case Opcode::SPUSH: {
        if (ins_.imm >= c_.constants.size()) fail(VmErrorKind::InvalidHandle, "bad constant index");
        auto it = st_.interned.find(ins_.imm);
        if (it == st_.interned.end()) {
          Word handle = static_cast<Word>(st_.heap.size());
          st_.heap.push_back(c_.constants[ins_.imm]);
          it = st_.interned.emplace(ins_.imm, handle).first;
        }
        push(it->second);
        break;
      }
      case Opcode::SEQ: {
        Word r = pop(), l = pop();
        push(deref(l) == deref(r));
        break;
      }
      case Opcode::LOADARG:
        if (ins_.imm >= st_.args.size()) fail(VmErrorKind::InvalidInstruction, "bad argument index");
        push(st_.args[ins_.imm]);
        break;
      case Opcode::RETURN:
        if (st_.function->return_type != Type::Void) {
          if (st_.stack.size() != 1) fail(VmErrorKind::StackUnderflow, "bad stack at RETURN");
          st_.returned_value = true;
        }
        st_.halted = true;
        break;
      case Opcode::HALT: st_.halted = true; break;
    }
  }

 private:
  VmState& st_;
  const Container& c_;
  const Instruction& ins_;
};

}  // namespace

void step(VmState& st, const Container& c, const GasSchedule& schedule, std::uint64_t gas_limit,
          std::vector<TraceEntry>* trace) {
  if (st.halted) return;
  auto ins = decode_instruction(c.code, st.pc, st.function->code_end());
  if (!ins || st.pc < st.function->code_offset) {
    throw VmError(VmErrorKind::InvalidInstruction, st.pc, st.gas_used, st.steps,
                  fmt::format("invalid instruction at offset {}", st.pc));
  }
  const std::uint64_t cost = schedule.cost(ins->op);
  if (cost > gas_limit || st.gas_used > gas_limit - cost) {
    throw VmError(VmErrorKind::OutOfGas, ins->offset, st.gas_used, st.steps,
                  fmt::format("out of gas at offset {}", ins->offset));
  }
  st.gas_used += cost;
  ++st.steps;
  Stepper(st, c, *ins).run();
  if (trace != nullptr) trace->push_back({ins->offset, ins->op, st.stack.size(), st.gas_used});
}

ExecutionResult execute(const Container& c, const CallData& call, std::uint64_t gas_limit,
                        const GasSchedule& schedule, std::vector<TraceEntry>* trace) {
  VmState st = bind_call(c, call);
  while (!st.halted) step(st, c, schedule, gas_limit, trace);

  ExecutionResult result;
  result.type = st.function->return_type;
  result.gas_used = st.gas_used;
  result.steps = st.steps;
  if (result.type == Type::Void) return result;
  if (!st.returned_value) {
    throw VmError(VmErrorKind::StackUnderflow, st.pc, st.gas_used, st.steps,
                  "function halted without a return value");
  }
  const Word w = st.stack.back();
  switch (result.type) {
    case Type::Int: result.value = std::int64_t{w}; break;
    case Type::Bool: result.value = (w != 0); break;
    case Type::String:
      if (w < 0 || static_cast<std::uint64_t>(w) >= st.heap.size()) {
        throw VmError(VmErrorKind::InvalidHandle, st.pc, st.gas_used, st.steps,
                      "returned an invalid heap handle");
      }
      result.value = st.heap[static_cast<std::size_t>(w)];
      break;
    case Type::Void: break;
  }
  return result;
}

}  // namespace koa

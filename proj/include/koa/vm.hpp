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

#ifndef KOA_VM_HPP
#define KOA_VM_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "koa/bytecode.hpp"

namespace koa {

using Word = std::int64_t;

inline constexpr std::size_t kMaxStackDepth = 1024;
inline constexpr std::size_t kMemoryWords = 65536;

/// A typed value at the call boundary: void, int, bool or string.
using Value = std::variant<std::monostate, std::int64_t, bool, std::string>;

Type type_of(const Value& v);

/// Decimal for int, `true`/`false` for bool, the text itself for string,
/// empty for void.
std::string render_value(const Value& v);

/// Per-opcode cost table. Every opcode costs 1 except SPUSH and SEQ (3).
class GasSchedule {
 public:
  GasSchedule();

  [[nodiscard]] std::uint64_t cost(Opcode op) const {
    return costs_[static_cast<std::uint8_t>(op)];
  }
  /// Throws std::invalid_argument for a zero cost.
  void set(Opcode op, std::uint64_t cost);

 private:
  std::array<std::uint64_t, 256> costs_{};
};

enum class VmErrorKind {
  UnknownSelector,
  ArityOrTypeMismatch,
  DivideByZero,
  OutOfGas,
  StackOverflow,
  StackUnderflow,
  BadJump,
  InvalidHandle,
  InvalidInstruction,
};

std::string_view to_string(VmErrorKind kind);

class VmError : public KoaError {
 public:
  VmError(VmErrorKind kind, std::uint32_t offset, std::uint64_t gas_used, std::uint64_t steps,
          const std::string& message);

  [[nodiscard]] VmErrorKind kind() const { return kind_; }
  [[nodiscard]] std::uint32_t offset() const { return offset_; }
  [[nodiscard]] std::uint64_t gas_used() const { return gas_used_; }
  [[nodiscard]] std::uint64_t steps() const { return steps_; }

 private:
  VmErrorKind kind_;
  std::uint32_t offset_;
  std::uint64_t gas_used_;
  std::uint64_t steps_;
};

/// The `callfunc` record: which function to run and with what.
struct CallData {
  Selector selector{};
  std::vector<Value> args;
};

struct ExecutionResult {
  Value value;
  Type type = Type::Void;
  std::uint64_t gas_used = 0;
  std::uint64_t steps = 0;
};

struct TraceEntry {
  std::uint32_t offset = 0;
  Opcode op = Opcode::HALT;
  std::size_t depth = 0;      // stack depth after the instruction
  std::uint64_t gas_used = 0; // cumulative, after the instruction
};

/// `0008 RETURN depth=0 gas=4`
std::string format_trace(const TraceEntry& e);

/// Machine state for one call. Memory is logically 65536 zero words; it is
/// stored sparsely and grows on first touch.
struct VmState {
  std::vector<Word> stack;
  std::vector<Word> memory;
  std::vector<std::string> heap;
  std::map<std::uint64_t, Word> interned;  // constant index -> heap handle
  CallData callfunc;
  std::vector<Word> args;  // argument words bound from callfunc
  const FunctionAbi* function = nullptr;
  std::uint32_t pc = 0;
  std::uint64_t gas_used = 0;
  std::uint64_t steps = 0;
  bool halted = false;
  bool returned_value = false;
};

/// Resolves the selector, type-checks and binds the arguments (strings are
/// interned into the heap first) and positions pc at the function entry.
VmState bind_call(const Container& container, const CallData& call);

/// Applies exactly one instruction. Gas is charged before the effect.
void step(VmState& state, const Container& container, const GasSchedule& schedule,
          std::uint64_t gas_limit, std::vector<TraceEntry>* trace = nullptr);

/// Runs the call to completion. The container must have passed
/// verify_bytecode; violations are still caught and reported as VmError.
ExecutionResult execute(const Container& container, const CallData& call,
                        std::uint64_t gas_limit, const GasSchedule& schedule = GasSchedule(),
                        std::vector<TraceEntry>* trace = nullptr);

}  // namespace koa

#endif  // KOA_VM_HPP

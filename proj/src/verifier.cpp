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

#include "koa/verifier.hpp"

#include <algorithm>
#include <set>

#include <fmt/core.h>

namespace koa {

VerifyError::VerifyError(std::uint32_t offset, std::string reason)
    : KoaError(Stage::Verify, fmt::format("{} at offset {}", reason, offset)),
      offset_(offset),
      reason_(std::move(reason)) {}

std::vector<Instruction> decode_region(const Container& c, const FunctionAbi& fn) {
  if (fn.code_length == 0) throw VerifyError(fn.code_offset, "empty function region");
  if (std::uint64_t{fn.code_offset} + fn.code_length > c.code.size()) {
    throw VerifyError(fn.code_offset, "function region exceeds code section");
  }
  std::vector<Instruction> out;
  std::uint32_t pc = fn.code_offset;
  while (pc < fn.code_end()) {
    auto ins = decode_instruction(c.code, pc, fn.code_end());
    if (!ins) {
      if (opcode_info(c.code[pc]) == nullptr) {
        throw VerifyError(pc, fmt::format("unknown opcode 0x{:02x}", c.code[pc]));
      }
      throw VerifyError(pc, "truncated instruction");
    }
    out.push_back(*ins);
    pc = ins->next();
  }
  return out;
}

namespace {

std::size_t index_of(const std::vector<Instruction>& ins, std::uint32_t offset) {
  auto it = std::lower_bound(ins.begin(), ins.end(), offset,
                             [](const Instruction& i, std::uint32_t o) { return i.offset < o; });
  if (it == ins.end() || it->offset != offset) return ins.size();
  return static_cast<std::size_t>(it - ins.begin());
}

void check_operands(const Container& c, const FunctionAbi& fn,
                    const std::vector<Instruction>& ins) {
  for (const auto& i : ins) {
    if (is_jump(i.op)) {
      if (i.imm <= i.offset) throw VerifyError(i.offset, "backward jump");
      if (i.imm == i.next()) {
        throw VerifyError(i.offset, "jump target must lie beyond the next instruction");
      }
      if (i.imm >= fn.code_end()) throw VerifyError(i.offset, "jump target outside function region");
      if (index_of(ins, static_cast<std::uint32_t>(i.imm)) == ins.size()) {
        throw VerifyError(i.offset, "misaligned jump target");
      }
    } else if (i.op == Opcode::SPUSH && i.imm >= c.constants.size()) {
      throw VerifyError(i.offset, fmt::format("constant index {} out of range", i.imm));
    } else if (i.op == Opcode::LOADARG && i.imm >= fn.params.size()) {
      throw VerifyError(i.offset, fmt::format("argument index {} out of range", i.imm));
    }
  }
}

}  // namespace

std::size_t stack_profile(const Container&, const FunctionAbi& fn,
                          const std::vector<Instruction>& ins) {
  constexpr long kUnknown = -1;
  std::vector<long> depth(ins.size(), kUnknown);
  depth[0] = 0;
  std::size_t max_depth = 0;
  const long arity = static_cast<long>(fn.return_arity());

  auto flow = [&](const Instruction& from, std::uint32_t to, long d) {
    std::size_t j = index_of(ins, to);
    if (j == ins.size()) throw VerifyError(from.offset, "control falls off end of function");
    if (depth[j] == kUnknown) {
      depth[j] = d;
    } else if (depth[j] != d) {
      throw VerifyError(to, fmt::format("inconsistent stack depth at join ({} vs {})",
                                        depth[j], d));
    }
  };

  // Jumps are forward-only, so offset order is a topological order.
  for (std::size_t k = 0; k < ins.size(); ++k) {
    const Instruction& i = ins[k];
    const long d = depth[k];
    if (d == kUnknown) continue;  // unreachable
    const OpcodeInfo& info = opcode_info(i.op);
    long pops = i.op == Opcode::RETURN ? arity : info.pops;
    if (d < pops) throw VerifyError(i.offset, "stack underflow");
    long after = d - pops + info.pushes;
    max_depth = std::max<std::size_t>(max_depth, static_cast<std::size_t>(std::max(d, after)));
    switch (i.op) {
      case Opcode::RETURN:
        if (d != arity) {
          throw VerifyError(i.offset,
                            fmt::format("stack depth {} at RETURN, expected {}", d, arity));
        }
        break;
      case Opcode::HALT:
        if (arity != 0) throw VerifyError(i.offset, "HALT in non-void function");
        break;
      case Opcode::JUMP:
        flow(i, static_cast<std::uint32_t>(i.imm), after);
        break;
      case Opcode::JUMPF:
        flow(i, i.next(), after);
        flow(i, static_cast<std::uint32_t>(i.imm), after);
        break;
      default:
        flow(i, i.next(), after);
        break;
    }
  }
  return max_depth;
}

VerifyReport verify_bytecode(const Container& c) {
  VerifyReport report;
  std::set<Selector> selectors;
  for (const auto& fn : c.functions) {
    if (!selectors.insert(fn.selector).second) {
      throw VerifyError(fn.code_offset, fmt::format("duplicate selector {} for '{}'",
                                                    selector_hex(fn.selector), fn.name));
    }
    auto ins = decode_region(c, fn);
    check_operands(c, fn, ins);
    report.max_stack_depth.push_back(stack_profile(c, fn, ins));
  }
  return report;
}

}  // namespace koa

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

#ifndef KOA_VERIFIER_HPP
#define KOA_VERIFIER_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "koa/bytecode.hpp"

namespace koa {

class VerifyError : public KoaError {
 public:
  VerifyError(std::uint32_t offset, std::string reason);

  [[nodiscard]] std::uint32_t offset() const { return offset_; }
  [[nodiscard]] const std::string& reason() const { return reason_; }

 private:
  std::uint32_t offset_;
  std::string reason_;
};

struct VerifyReport {
  /// Maximum operand stack depth per function, in container order.
  std::vector<std::size_t> max_stack_depth;
};

/// Static checks required before a container may be deployed or executed:
/// regions in bounds, defined opcodes, forward jumps onto instruction
/// boundaries of the same region, operands in range, and a stack-depth
/// simulation proving no underflow, consistent joins, the declared return
/// arity at every RETURN and no path falling off the region.
VerifyReport verify_bytecode(const Container& container);

/// Decodes [code_offset, code_end) into instructions. Throws VerifyError on
/// an undefined opcode or truncated immediate, or if the region is out of
/// bounds.
std::vector<Instruction> decode_region(const Container& container, const FunctionAbi& fn);

/// Stack-depth simulation of a single function; returns the maximum depth.
/// Assumes the jump checks already passed.
std::size_t stack_profile(const Container& container, const FunctionAbi& fn,
                          const std::vector<Instruction>& instructions);

}  // namespace koa

#endif  // KOA_VERIFIER_HPP

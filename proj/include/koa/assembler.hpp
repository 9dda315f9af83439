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

#ifndef KOA_ASSEMBLER_HPP
#define KOA_ASSEMBLER_HPP

#include <string>
#include <string_view>

#include "koa/bytecode.hpp"

namespace koa {

class AssembleError : public KoaError {
 public:
  AssembleError(int line, const std::string& message);
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// Renders a container as a `.kasm` listing:
///
///   .const 0 "hello"
///   .func add(int,int) -> int selector=dcad5462 offset=0 length=8
///   ; add
///   0000: LOADARG 0
///   ...
///
/// Offsets and immediates are decimal. assemble() accepts the result and
/// reproduces the container byte for byte.
std::string disassemble(const Container& container);

/// Parses a listing. Instruction lines are `[OFFSET:] MNEMONIC [imm]`; `;`
/// starts a comment. `.func` without offset/length opens a region at the
/// current code position that runs to the next region or the end of code.
/// A listing without any `.func` gets one implicit `main() -> int` spanning
/// all code.
Container assemble(std::string_view text);

}  // namespace koa

#endif  // KOA_ASSEMBLER_HPP

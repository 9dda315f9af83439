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

#ifndef KOA_CODEGEN_HPP
#define KOA_CODEGEN_HPP

#include "koa/bytecode.hpp"
#include "koa/typecheck.hpp"

namespace koa {

/// Lowers a type-checked, recursion-free contract to bytecode.
///
/// Every function gets its own contiguous code region. Calls are inlined:
/// arguments are evaluated left to right, then stored into fresh memory slots
/// of the callee expansion. Parameters of the called function itself are read
/// with LOADARG unless the body assigns to them, in which case they are copied
/// into a slot on entry. `&&` and `||` short-circuit through JUMPF. All jumps
/// are forward and never target the immediately following instruction.
///
/// Throws CompileError on memory slot exhaustion or a selector collision.
Container compile(const TypedContract& contract);

}  // namespace koa

#endif  // KOA_CODEGEN_HPP

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

#ifndef KOA_PIPELINE_HPP
#define KOA_PIPELINE_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "koa/bytecode.hpp"
#include "koa/typecheck.hpp"
#include "koa/verifier.hpp"

namespace koa {

/// Lex, parse, type-check and reject recursion.
TypedContract check_source(std::string_view source);

struct CompileResult {
  TypedContract typed;
  Container container;
  std::vector<std::uint8_t> bytes;
  VerifyReport verify;
};

/// The whole front half of the toolchain: check_source, compile, encode, and
/// verify the output. Throws the SourceError of the first failing stage.
CompileResult compile_source(std::string_view source);

}  // namespace koa

#endif  // KOA_PIPELINE_HPP

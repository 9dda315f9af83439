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

#include "koa/pipeline.hpp"

#include "koa/codegen.hpp"
#include "koa/parser.hpp"

namespace koa {

TypedContract check_source(std::string_view source) {
  TypedContract typed = typecheck(parse_source(source));
  detect_recursion(typed);
  return typed;
}

CompileResult compile_source(std::string_view source) {
  CompileResult out{check_source(source), {}, {}, {}};
  out.container = compile(out.typed);
  out.bytes = encode(out.container);
  out.verify = verify_bytecode(out.container);
  return out;
}

}  // namespace koa

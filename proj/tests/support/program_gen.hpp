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

#ifndef KOA_TESTS_PROGRAM_GEN_HPP
#define KOA_TESTS_PROGRAM_GEN_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "koa/ast.hpp"
#include "koa/vm.hpp"

namespace koa::testing {

using Rng = std::mt19937_64;

struct GenOptions {
  int max_functions = 5;   // call DAG size
  int max_params = 3;
  int max_expr_depth = 3;
  int max_if_depth = 4;
  int max_stmts = 4;       // per block, before the final return
  bool straight_line = false;  // no if, && or ||
  bool allow_void = true;
};

struct GeneratedFunction {
  std::string name;
  std::vector<Type> params;
  Type returns = Type::Int;
};

/// A random well-typed, recursion-free contract. Function i only calls
/// functions j > i, so the call graph is a DAG by construction.
struct GeneratedProgram {
  std::string source;
  std::vector<GeneratedFunction> functions;
};

GeneratedProgram generate_program(Rng& rng, const GenOptions& options = {});

/// Random call argument of type `t`.
Value random_value(Rng& rng, Type t);
std::vector<Value> random_args(Rng& rng, const std::vector<Type>& params);

/// Textual form accepted by the chain layer (`coerce_argument`).
std::string arg_text(const Value& v);

/// Program whose every branch is controlled by its own bool parameter, so
/// that each CFG path is reachable by some input. Parameters: k bools
/// followed by two ints.
GeneratedProgram generate_branchy_program(Rng& rng, int bool_params);

}  // namespace koa::testing

#endif  // KOA_TESTS_PROGRAM_GEN_HPP

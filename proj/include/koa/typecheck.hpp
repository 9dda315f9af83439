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

#ifndef KOA_TYPECHECK_HPP
#define KOA_TYPECHECK_HPP

#include <cstddef>
#include <vector>

#include "koa/ast.hpp"

namespace koa {

/// A contract whose expressions all carry a type, plus its static call graph.
struct TypedContract {
  Contract ast;
  /// callees[i] = indices of functions called from function i, in order of
  /// first occurrence, without duplicates.
  std::vector<std::vector<std::size_t>> callees;

  [[nodiscard]] std::size_t index_of(std::string_view name) const;
};

/// Checks the typing rules and annotates every expression. All violations
/// are collected into one TypeError.
TypedContract typecheck(Contract contract);

/// Throws CycleError naming one cycle when the call graph is not a DAG.
void detect_recursion(const TypedContract& contract);

/// Function indices ordered callees-before-callers. Requires an acyclic graph.
std::vector<std::size_t> topological_order(const TypedContract& contract);

}  // namespace koa

#endif  // KOA_TYPECHECK_HPP

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

#ifndef KOA_ANALYSIS_HPP
#define KOA_ANALYSIS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "koa/bytecode.hpp"
#include "koa/typecheck.hpp"
#include "koa/vm.hpp"

namespace koa {

class CfgError : public KoaError {
 public:
  explicit CfgError(const std::string& what) : KoaError(Stage::Analysis, what) {}
};

struct BasicBlock {
  std::uint32_t start = 0;  // offset of the leader
  std::uint32_t end = 0;    // one past the last instruction
  std::vector<Opcode> ops;
  std::vector<std::size_t> successors;  // block indices
};

/// Control-flow graph of one function region. Blocks are in offset order,
/// which is a topological order because every edge points forward.
struct Cfg {
  std::vector<BasicBlock> blocks;
  std::size_t max_stack_depth = 0;

  [[nodiscard]] std::size_t edge_count() const;
  [[nodiscard]] std::uint64_t block_cost(std::size_t b, const GasSchedule& schedule) const;
};

/// Leader-based block construction over the function's region. Leaders are
/// the region start, every jump target and every instruction following a
/// jump or terminator. Throws CfgError on a cycle or a jump that does not
/// land on an instruction in the region.
Cfg build_cfg(const Container& container, const FunctionAbi& function);

struct FunctionCost {
  std::string name;
  Selector selector{};
  std::uint64_t worst_case_gas = 0;
  std::uint64_t worst_case_steps = 0;
  std::size_t max_stack_depth = 0;
  std::vector<std::uint32_t> witness_path;  // block start offsets

  friend bool operator==(const FunctionCost&, const FunctionCost&) = default;
};

/// Longest path over the DAG, computed backwards from the exits:
/// cost(b) = blockCost(b) + max over successors. The witness follows the
/// argmax links from the entry block (ties go to the lowest offset).
FunctionCost worst_case_cost(const Cfg& cfg, const GasSchedule& schedule);

struct CostReport {
  std::vector<FunctionCost> functions;

  [[nodiscard]] const FunctionCost* find(std::string_view name) const;
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Verifies the container, then computes the cost of every function.
CostReport analyze(const Container& container, const GasSchedule& schedule = GasSchedule());

/// Text table: function, gas bound, step bound, max stack.
std::string render_cost_table(const CostReport& report);

class StatelessViolation : public KoaError {
 public:
  explicit StatelessViolation(const std::string& what) : KoaError(Stage::Analysis, what) {}
};

/// The AST has no construct that touches persistent state. Visiting every
/// node keeps this honest when node kinds are added.
void check_stateless(const TypedContract& contract);

/// Every opcode in the code section is one of the defined instructions.
void check_stateless(std::span<const std::uint8_t> code);

}  // namespace koa

#endif  // KOA_ANALYSIS_HPP

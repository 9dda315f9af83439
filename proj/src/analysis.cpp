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

#include "koa/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/core.h>

#include "koa/verifier.hpp"

namespace koa {

std::size_t Cfg::edge_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.successors.size();
  return n;
}

std::uint64_t Cfg::block_cost(std::size_t b, const GasSchedule& schedule) const {
  std::uint64_t total = 0;
  for (Opcode op : blocks[b].ops) total += schedule.cost(op);
  return total;
}

Cfg build_cfg(const Container& c, const FunctionAbi& fn) {
  std::vector<Instruction> ins;
  try {
    ins = decode_region(c, fn);
  } catch (const VerifyError& e) {
    throw CfgError(e.what());
  }

  std::set<std::uint32_t> offsets;
  for (const auto& i : ins) offsets.insert(i.offset);

  std::set<std::uint32_t> leaders{fn.code_offset};
  for (const auto& i : ins) {
    if (is_jump(i.op)) {
      auto target = static_cast<std::uint32_t>(i.imm);
      if (i.imm >= fn.code_end() || i.imm < fn.code_offset || !offsets.contains(target)) {
        throw CfgError(fmt::format("jump at offset {} does not land on an instruction", i.offset));
      }
      leaders.insert(target);
    }
    if ((is_jump(i.op) || is_terminator(i.op)) && i.next() < fn.code_end()) {
      leaders.insert(i.next());
    }
  }

  Cfg cfg;
  std::map<std::uint32_t, std::size_t> block_at;
  for (const auto& i : ins) {
    if (leaders.contains(i.offset)) {
      block_at[i.offset] = cfg.blocks.size();
      cfg.blocks.push_back(BasicBlock{i.offset, i.offset, {}, {}});
    }
    cfg.blocks.back().ops.push_back(i.op);
    cfg.blocks.back().end = i.next();
  }

  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    auto& block = cfg.blocks[b];
    // The last instruction of the block decides the edges.
    const Instruction& last = *std::find_if(ins.rbegin(), ins.rend(), [&](const Instruction& i) {
      return i.offset < block.end;
    });
    auto add = [&](std::uint32_t to) {
      auto it = block_at.find(to);
      if (it == block_at.end()) return;  // falls off the region; the verifier rejects this
      if (std::find(block.successors.begin(), block.successors.end(), it->second) ==
          block.successors.end()) {
        block.successors.push_back(it->second);
      }
    };
    switch (last.op) {
      case Opcode::RETURN:
      case Opcode::HALT: break;
      case Opcode::JUMP: add(static_cast<std::uint32_t>(last.imm)); break;
      case Opcode::JUMPF:
        add(last.next());
        add(static_cast<std::uint32_t>(last.imm));
        break;
      default: add(last.next()); break;
    }
  }

  // Cycle check (Kahn); blocks are not assumed to be in topological order.
  std::vector<std::size_t> indegree(cfg.blocks.size(), 0);
  for (const auto& b : cfg.blocks) {
    for (auto s : b.successors) ++indegree[s];
  }
  std::vector<std::size_t> ready;
  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    if (indegree[b] == 0) ready.push_back(b);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t b = ready.back();
    ready.pop_back();
    ++seen;
    for (auto s : cfg.blocks[b].successors) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (seen != cfg.blocks.size()) {
    throw CfgError(fmt::format("control-flow cycle in function '{}'", fn.name));
  }

  cfg.max_stack_depth = stack_profile(c, fn, ins);
  return cfg;
}

FunctionCost worst_case_cost(const Cfg& cfg, const GasSchedule& schedule) {
  const std::size_t n = cfg.blocks.size();
  std::vector<std::uint64_t> gas(n, 0);
  std::vector<std::uint64_t> steps(n, 0);
  std::vector<std::size_t> best(n, n);

  // Edges go to higher offsets, so reverse offset order is reverse topological.
  for (std::size_t k = n; k-- > 0;) {
    const auto& block = cfg.blocks[k];
    std::uint64_t tail_gas = 0;
    std::uint64_t tail_steps = 0;
    for (auto s : block.successors) {
      if (s <= k) throw CfgError("backward edge in control-flow graph");
      if (best[k] == n || gas[s] > tail_gas ||
          (gas[s] == tail_gas && cfg.blocks[s].start < cfg.blocks[best[k]].start)) {
        tail_gas = gas[s];
        best[k] = s;
      }
      tail_steps = std::max(tail_steps, steps[s]);
    }
    gas[k] = cfg.block_cost(k, schedule) + tail_gas;
    steps[k] = block.ops.size() + tail_steps;
  }

  FunctionCost out;
  if (n == 0) return out;
  out.worst_case_gas = gas[0];
  out.worst_case_steps = steps[0];
  out.max_stack_depth = cfg.max_stack_depth;
  for (std::size_t b = 0; b != n; b = best[b]) out.witness_path.push_back(cfg.blocks[b].start);
  return out;
}

const FunctionCost* CostReport::find(std::string_view name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

CostReport analyze(const Container& c, const GasSchedule& schedule) {
  verify_bytecode(c);
  CostReport report;
  for (const auto& fn : c.functions) {
    FunctionCost cost = worst_case_cost(build_cfg(c, fn), schedule);
    cost.name = fn.name;
    cost.selector = fn.selector;
    report.functions.push_back(std::move(cost));
  }
  return report;
}

std::string render_cost_table(const CostReport& report) {
  std::size_t width = 8;
  for (const auto& f : report.functions) width = std::max(width, f.name.size());
  std::string out = fmt::format("{:<{}}  {:>10}  {:>10}  {:>9}\n", "function", width,
                                "gas bound", "step bound", "max stack");
  for (const auto& f : report.functions) {
    out += fmt::format("{:<{}}  {:>10}  {:>10}  {:>9}\n", f.name, width, f.worst_case_gas,
                       f.worst_case_steps, f.max_stack_depth);
  }
  return out;
}

namespace {

struct StatelessVisitor {
  void block(const Block& b) {
    for (const auto& s : b.stmts) stmt(s);
  }
  void stmt(const Stmt& s) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, LetStmt>) {
            expr(*node.init);
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            expr(*node.value);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            expr(*node.cond);
            block(node.then_block);
            if (node.else_block) block(*node.else_block);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (node.value) expr(*node.value);
          } else {
            static_assert(std::is_same_v<T, ExprStmt>, "unhandled statement kind");
            expr(*node.expr);
          }
        },
        s.node);
  }
  void expr(const Expr& e) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Prefix>) {
            expr(*node.operand);
          } else if constexpr (std::is_same_v<T, Infix>) {
            expr(*node.left);
            expr(*node.right);
          } else if constexpr (std::is_same_v<T, Call>) {
            for (const auto& a : node.args) expr(*a);
          } else {
            static_assert(std::is_same_v<T, IntLit> || std::is_same_v<T, BoolLit> ||
                              std::is_same_v<T, StrLit> || std::is_same_v<T, Ident>,
                          "unhandled expression kind");
          }
        },
        e.node);
  }
};

}  // namespace

void check_stateless(const TypedContract& contract) {
  StatelessVisitor v;
  for (const auto& f : contract.ast.functions) v.block(f.body);
}

void check_stateless(std::span<const std::uint8_t> code) {
  std::size_t pc = 0;
  while (pc < code.size()) {
    const OpcodeInfo* info = opcode_info(code[pc]);
    if (info == nullptr) {
      throw StatelessViolation(
          fmt::format("unknown opcode 0x{:02x} at offset {}", code[pc], pc));
    }
    pc += 1 + info->imm_width;
  }
}

}  // namespace koa

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

#include <doctest.h>

#include <limits>

#include "koa/assembler.hpp"
#include "koa/pipeline.hpp"
#include "koa/reference.hpp"
#include "koa/vm.hpp"

using namespace koa;

namespace {

constexpr const char* kArith =
    "contract A {\n"
    "  func add(a int, b int) int { return a + b }\n"
    "  func div(a int, b int) int { return a / b }\n"
    "  func mod(a int, b int) int { return a % b }\n"
    "  func one() int { return 1 }\n"
    "  func expr() int { return 2 + 3 * 4 }\n"
    "  func greet(s string) string { if s == \"\" { return \"anon\" } return s }\n"
    "  func both(a bool, b bool) bool { return a && b }\n"
    "  func nothing() { }\n"
    "}\n";

CallData call_of(const Container& c, std::string_view fn, std::vector<Value> args) {
  const FunctionAbi* f = c.find(fn);
  REQUIRE(f != nullptr);
  return CallData{f->selector, std::move(args)};
}

VmErrorKind vm_error(const Container& c, const CallData& call, std::uint64_t gas = 1000) {
  try {
    (void)execute(c, call, gas);
  } catch (const VmError& e) {
    return e.kind();
  }
  FAIL("expected VmError");
  return VmErrorKind::InvalidInstruction;
}

}  // namespace

TEST_CASE("execute: add") {
  auto r = compile_source(kArith);
  auto res = execute(r.container, call_of(r.container, "add", {std::int64_t{1}, std::int64_t{2}}), 1000);
  CHECK(std::get<std::int64_t>(res.value) == 3);
  CHECK(res.type == Type::Int);
  CHECK(res.gas_used == 4);
  CHECK(res.steps == 4);
  CHECK(interpret_reference(r.typed, "add", {std::int64_t{1}, std::int64_t{2}}) == Value{std::int64_t{3}});
}

TEST_CASE("execute: errors") {
  auto r = compile_source(kArith);
  const auto& c = r.container;
  CHECK(vm_error(c, call_of(c, "add", {std::int64_t{1}, std::int64_t{2}}), 0) == VmErrorKind::OutOfGas);
  CHECK(vm_error(c, call_of(c, "add", {std::int64_t{1}, std::int64_t{2}}), 3) == VmErrorKind::OutOfGas);
  CHECK(vm_error(c, call_of(c, "div", {std::int64_t{1}, std::int64_t{0}})) == VmErrorKind::DivideByZero);
  CHECK(vm_error(c, call_of(c, "mod", {std::int64_t{1}, std::int64_t{0}})) == VmErrorKind::DivideByZero);
  CHECK(vm_error(c, CallData{Selector{0, 0, 0, 0}, {}}) == VmErrorKind::UnknownSelector);
  CHECK(vm_error(c, call_of(c, "add", {std::int64_t{1}})) == VmErrorKind::ArityOrTypeMismatch);
  CHECK(vm_error(c, call_of(c, "add", {std::int64_t{1}, true})) == VmErrorKind::ArityOrTypeMismatch);

  try {
    (void)execute(c, call_of(c, "div", {std::int64_t{1}, std::int64_t{0}}), 1000);
  } catch (const VmError& e) {
    CHECK(std::string(e.what()).rfind("divide by zero at offset ", 0) == 0);
    CHECK(e.gas_used() > 0);
  }
}

TEST_CASE("execute: wrapping arithmetic") {
  auto r = compile_source(kArith);
  const auto& c = r.container;
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  CHECK(std::get<std::int64_t>(execute(c, call_of(c, "add", {kMax, std::int64_t{1}}), 100).value) == kMin);
  CHECK(std::get<std::int64_t>(execute(c, call_of(c, "div", {kMin, std::int64_t{-1}}), 100).value) == kMin);
  CHECK(std::get<std::int64_t>(execute(c, call_of(c, "mod", {kMin, std::int64_t{-1}}), 100).value) == 0);
  CHECK(std::get<std::int64_t>(execute(c, call_of(c, "div", {std::int64_t{-7}, std::int64_t{2}}), 100).value) == -3);
  CHECK(std::get<std::int64_t>(execute(c, call_of(c, "mod", {std::int64_t{-7}, std::int64_t{2}}), 100).value) == -1);
}

TEST_CASE("execute: strings, bools and void") {
  auto r = compile_source(kArith);
  const auto& c = r.container;
  CHECK(std::get<std::string>(execute(c, call_of(c, "greet", {std::string{}}), 100).value) == "anon");
  CHECK(std::get<std::string>(execute(c, call_of(c, "greet", {std::string{"bo"}}), 100).value) == "bo");
  CHECK(std::get<bool>(execute(c, call_of(c, "both", {true, true}), 100).value) == true);
  CHECK(std::get<bool>(execute(c, call_of(c, "both", {false, true}), 100).value) == false);
  auto v = execute(c, call_of(c, "nothing", {}), 100);
  CHECK(v.type == Type::Void);
  CHECK(std::holds_alternative<std::monostate>(v.value));
  CHECK(render_value(Value{std::int64_t{-5}}) == "-5");
  CHECK(render_value(Value{true}) == "true");
}

TEST_CASE("interpret_reference: examples") {
  auto r = compile_source(kArith);
  CHECK(interpret_reference(r.typed, "one", {}) == Value{std::int64_t{1}});
  CHECK(interpret_reference(r.typed, "expr", {}) == Value{std::int64_t{14}});
  CHECK_THROWS_AS((void)interpret_reference(r.typed, "div", {std::int64_t{1}, std::int64_t{0}}), RuntimeError);
}

TEST_CASE("step: SUB operand order") {
  Container c = assemble("PUSH 2\nPUSH 3\nSUB\nRETURN\n");
  VmState st = bind_call(c, CallData{c.functions[0].selector, {}});
  GasSchedule sched;
  step(st, c, sched, 100);
  step(st, c, sched, 100);
  CHECK(st.stack == std::vector<Word>{2, 3});
  step(st, c, sched, 100);
  CHECK(st.stack == std::vector<Word>{-1});
}

TEST_CASE("step: JUMPF on a non-zero value falls through") {
  Container c = assemble("PUSH 9\nPUSH 5\nJUMPF 24\nRETURN\nRETURN\n");
  VmState st = bind_call(c, CallData{c.functions[0].selector, {}});
  GasSchedule sched;
  step(st, c, sched, 100);
  step(st, c, sched, 100);
  const auto pc = st.pc;
  step(st, c, sched, 100);
  CHECK(st.stack == std::vector<Word>{9});
  CHECK(st.pc == pc + 5);
}

TEST_CASE("step: SPUSH twice on one constant compares equal") {
  Container c = assemble(".const 0 \"k\"\n.func main() -> bool\nSPUSH 0\nSPUSH 0\nSEQ\nRETURN\n");
  auto res = execute(c, CallData{c.functions[0].selector, {}}, 100);
  CHECK(std::get<bool>(res.value) == true);
  CHECK(res.gas_used == 3 + 3 + 3 + 1);
}

TEST_CASE("execute: gas equals the schedule sum over the trace") {
  auto r = compile_source(kArith);
  const auto& c = r.container;
  std::vector<TraceEntry> trace;
  GasSchedule sched;
  auto res = execute(c, call_of(c, "greet", {std::string{"x"}}), 1000, sched, &trace);
  std::uint64_t sum = 0;
  for (const auto& t : trace) sum += sched.cost(t.op);
  CHECK(sum == res.gas_used);
  CHECK(trace.size() == res.steps);
  CHECK(format_trace(trace.back()).find(" RETURN depth=1 gas=") != std::string::npos);
}

TEST_CASE("execute: calls are isolated") {
  auto r = compile_source(kArith);
  const auto& c = r.container;
  auto a = execute(c, call_of(c, "greet", {std::string{"q"}}), 1000);
  auto b = execute(c, call_of(c, "greet", {std::string{"q"}}), 1000);
  CHECK(a.value == b.value);
  CHECK(a.gas_used == b.gas_used);
}

TEST_CASE("GasSchedule rejects zero costs") {
  GasSchedule s;
  CHECK(s.cost(Opcode::ADD) == 1);
  CHECK(s.cost(Opcode::SPUSH) == 3);
  CHECK(s.cost(Opcode::SEQ) == 3);
  CHECK_THROWS_AS(s.set(Opcode::ADD, 0), std::invalid_argument);
}

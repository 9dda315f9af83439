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

#include "koa/json_io.hpp"

#include <stdexcept>

namespace koa {


Type type_from_name(std::string_view name) {
  if (name == "int") return Type::Int;
  if (name == "bool") return Type::Bool;
  if (name == "string") return Type::String;
  if (name == "void") return Type::Void;
  throw std::invalid_argument("unknown type name");
}

Json cost_report_to_json(const CostReport& report) {
  Json out = Json::object();
  for (const auto& f : report.functions) {
    out[f.name] = {
        {"selector", selector_hex(f.selector)},
        {"worstCaseGas", f.worst_case_gas},
        {"worstCaseSteps", f.worst_case_steps},
        {"maxStackDepth", f.max_stack_depth},
        {"witnessPath", f.witness_path},
    };
  }
  return out;
}

CostReport cost_report_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("cost report must be an object");
  CostReport report;
  for (const auto& [name, v] : j.items()) {
    FunctionCost f;
    f.name = name;
    auto sel = parse_selector(v.at("selector").get<std::string>());
    if (!sel) throw std::invalid_argument("bad selector in cost report");
    f.selector = *sel;
    f.worst_case_gas = v.at("worstCaseGas").get<std::uint64_t>();
    f.worst_case_steps = v.at("worstCaseSteps").get<std::uint64_t>();
    f.max_stack_depth = v.at("maxStackDepth").get<std::size_t>();
    f.witness_path = v.at("witnessPath").get<std::vector<std::uint32_t>>();
    report.functions.push_back(std::move(f));
  }
  return report;
}

Json abi_to_json(const std::vector<AbiEntry>& abi) {
  Json out = Json::array();
  for (const auto& e : abi) {
    Json params = Json::array();
    for (Type t : e.params) params.push_back(to_string(t));
    out.push_back({{"name", e.name},
                   {"params", params},
                   {"returns", to_string(e.returns)},
                   {"selector", selector_hex(e.selector)}});
  }
  return out;
}

std::vector<AbiEntry> abi_from_json(const Json& j) {
  std::vector<AbiEntry> out;
  for (const auto& v : j) {
    AbiEntry e;
    e.name = v.at("name").get<std::string>();
    for (const auto& p : v.at("params")) {
      Type t = type_from_name(p.get<std::string>());
      if (t == Type::Void) throw std::invalid_argument("void parameter");
      e.params.push_back(t);
    }
    e.returns = type_from_name(v.at("returns").get<std::string>());
    auto sel = parse_selector(v.at("selector").get<std::string>());
    if (!sel) throw std::invalid_argument("bad selector");
    e.selector = *sel;
    out.push_back(std::move(e));
  }
  return out;
}

Json diagnostic_to_json(const Diagnostic& d) {
  return {{"stage", std::string(to_string(d.stage))},
          {"line", d.line},
          {"col", d.col},
          {"message", d.message}};
}

}  // namespace koa

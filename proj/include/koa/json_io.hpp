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

#ifndef KOA_JSON_IO_HPP
#define KOA_JSON_IO_HPP

#include <json.hpp>

#include "koa/analysis.hpp"
#include "koa/chain.hpp"
#include "koa/diagnostics.hpp"

namespace koa {

/// Insertion-ordered so that reports keep function order through a reload.
using Json = nlohmann::ordered_json;

/// {"name": {"worstCaseGas": .., "worstCaseSteps": .., "maxStackDepth": ..,
///  "witnessPath": [..], "selector": ".."}, ...}
Json cost_report_to_json(const CostReport& report);
CostReport cost_report_from_json(const Json& j);

/// [{"name": .., "params": ["int", ..], "returns": "int", "selector": ".."}]
Json abi_to_json(const std::vector<AbiEntry>& abi);
std::vector<AbiEntry> abi_from_json(const Json& j);

Json diagnostic_to_json(const Diagnostic& d);

Type type_from_name(std::string_view name);  // throws std::invalid_argument

}  // namespace koa

#endif  // KOA_JSON_IO_HPP

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

#include "koa/diagnostics.hpp"

#include <fmt/core.h>

namespace koa {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Lex: return "lex";
    case Stage::Parse: return "parse";
    case Stage::Type: return "type";
    case Stage::Compile: return "compile";
    case Stage::Verify: return "verify";
    case Stage::Analysis: return "analysis";
    case Stage::Chain: return "chain";
    case Stage::Vm: return "vm";
    case Stage::Usage: return "usage";
  }
  return "?";
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "; ";
    out += format_diagnostic(d);
  }
  return out;
}

}  // namespace

SourceError::SourceError(Stage stage, std::vector<Diagnostic> diagnostics)
    : KoaError(stage, join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

CycleError::CycleError(std::vector<std::string> cycle, SourcePos pos)
    : SourceError(Stage::Compile,
                  {{Stage::Compile, pos.line, pos.col, [&] {
                      std::string text = "recursive call cycle: ";
                      for (std::size_t i = 0; i < cycle.size(); ++i) {
                        if (i) text += " -> ";
                        text += cycle[i];
                      }
                      return text;
                    }()}}),
      cycle_(std::move(cycle)) {}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  if (d.line <= 0) {
    if (file.empty()) return d.message;
    return fmt::format("{}: {}", file, d.message);
  }
  if (file.empty()) return fmt::format("{}:{} {}", d.line, d.col, d.message);
  return fmt::format("{}:{}:{} {}", file, d.line, d.col, d.message);
}

}  // namespace koa

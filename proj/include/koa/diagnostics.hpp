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

#ifndef KOA_DIAGNOSTICS_HPP
#define KOA_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace koa {

/// Pipeline stage that produced a diagnostic. Rendered as `error[<stage>]`.
enum class Stage { Lex, Parse, Type, Compile, Verify, Analysis, Chain, Vm, Usage };

std::string_view to_string(Stage stage);

struct SourcePos {
  int line = 0;
  int col = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct Diagnostic {
  Stage stage = Stage::Compile;
  int line = 0;  // 0 when the error has no source position
  int col = 0;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Base of every error the toolchain throws.
class KoaError : public std::runtime_error {
 public:
  KoaError(Stage stage, const std::string& what)
      : std::runtime_error(what), stage_(stage) {}

  [[nodiscard]] Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

/// An error carrying one or more positioned source diagnostics.
class SourceError : public KoaError {
 public:
  SourceError(Stage stage, std::vector<Diagnostic> diagnostics);

  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const {
    return diagnostics_;
  }

 private:
  std::vector<Diagnostic> diagnostics_;
};

class LexError : public SourceError {
 public:
  LexError(int line, int col, std::string message)
      : SourceError(Stage::Lex, {{Stage::Lex, line, col, std::move(message)}}) {}
};

class ParseError : public SourceError {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics)
      : SourceError(Stage::Parse, std::move(diagnostics)) {}
};

class TypeError : public SourceError {
 public:
  explicit TypeError(std::vector<Diagnostic> diagnostics)
      : SourceError(Stage::Type, std::move(diagnostics)) {}
};

/// Raised when the static call graph has a cycle. `cycle` lists the function
/// names along the cycle with the first name repeated at the end.
class CycleError : public SourceError {
 public:
  CycleError(std::vector<std::string> cycle, SourcePos pos);

  [[nodiscard]] const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class CompileError : public SourceError {
 public:
  explicit CompileError(std::string message, SourcePos pos = {})
      : SourceError(Stage::Compile,
                    {{Stage::Compile, pos.line, pos.col, std::move(message)}}) {}
};

/// "file:line:col message" or just "message" when unpositioned.
std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});

}  // namespace koa

#endif  // KOA_DIAGNOSTICS_HPP

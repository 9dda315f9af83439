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

#ifndef KOA_REFERENCE_HPP
#define KOA_REFERENCE_HPP

#include <string_view>
#include <vector>

#include "koa/typecheck.hpp"
#include "koa/vm.hpp"

namespace koa {

class RuntimeError : public KoaError {
 public:
  RuntimeError(VmErrorKind kind, const std::string& message)
      : KoaError(Stage::Vm, message), kind_(kind) {}
  [[nodiscard]] VmErrorKind kind() const { return kind_; }

 private:
  VmErrorKind kind_;
};

/// Big-step evaluation of a typed AST with ordinary call frames and
/// source-level short-circuit `&&`/`||`. Independent of the compiler and the
/// VM; used as the oracle for differential testing.
Value interpret_reference(const TypedContract& contract, std::string_view function,
                          const std::vector<Value>& args);

}  // namespace koa

#endif  // KOA_REFERENCE_HPP

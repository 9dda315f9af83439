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

#ifndef KOA_CLI_HPP
#define KOA_CLI_HPP

#include <ostream>

#include "koa/diagnostics.hpp"

namespace koa {

/// Entry point of the `koa` command. Exit codes: 0 success, 1 usage,
/// 2 compile or verify errors, 3 chain or VM errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Exit code for an error raised at `stage`.
int exit_code_for(Stage stage);

}  // namespace koa

#endif  // KOA_CLI_HPP

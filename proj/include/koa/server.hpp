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

#ifndef KOA_SERVER_HPP
#define KOA_SERVER_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "koa/chain.hpp"
#include "koa/json_io.hpp"

namespace koa {

inline constexpr std::uint64_t kDefaultGasLimit = 1'000'000;

struct ApiResponse {
  int status = 200;
  Json body;
};

// Request handlers behind the HTTP routes. They take parsed JSON bodies and
// never throw; failures are encoded as status + body.

/// CompileResponse: {ok, bytecodeHex, abi, disassembly, costReport, errors}.
/// User-program errors are status 200 with ok=false.
ApiResponse api_compile(const Json& request);
/// {bytecodeHex} -> 200 {address} | 422 {error}
ApiResponse api_deploy(Ledger& ledger, const Json& request);
/// {address, function, args[, gasLimit, trace]} -> CallResponse
/// {ok, value, type, gasUsed, steps, error}. VM failures are 200 with
/// ok=false; unknown address/function are 404.
ApiResponse api_call(const Ledger& ledger, const Json& request);
/// [{address, abi, deployedAt, costReport}]
ApiResponse api_contracts(const Ledger& ledger);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path ledger = "koa-ledger.jsonl";
};

/// HTTP/1.1 JSON service for the playground.
class HttpService {
 public:
  explicit HttpService(ServiceConfig config);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds the socket; returns the bound port. Throws on failure.
  int bind();
  /// Serves until stop(). bind() must have succeeded.
  void listen();
  void stop();

  [[nodiscard]] Ledger& ledger();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace koa

#endif  // KOA_SERVER_HPP

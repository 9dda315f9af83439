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

#include "koa/server.hpp"

#include <httplib.h>

#include <fmt/core.h>

#include "koa/assembler.hpp"
#include "koa/pipeline.hpp"

namespace koa {

namespace {

Json error_body(const std::string& message) { return Json{{"error", message}}; }

Json compile_failure(std::vector<Diagnostic> diagnostics) {
  Json errors = Json::array();
  for (const auto& d : diagnostics) errors.push_back(diagnostic_to_json(d));
  return Json{{"ok", false},          {"bytecodeHex", ""},   {"abi", Json::array()},
              {"disassembly", ""},    {"costReport", Json::object()},
              {"errors", errors}};
}

}  // namespace

ApiResponse api_compile(const Json& request) {
  if (!request.is_object() || !request.contains("source") || !request["source"].is_string()) {
    return {400, error_body("request body must be {\"source\": string}")};
  }
  const auto source = request["source"].get<std::string>();
  try {
    CompileResult r = compile_source(source);
    CostReport cost = analyze(r.container);
    return {200, Json{{"ok", true},
                      {"bytecodeHex", to_hex(r.bytes)},
                      {"abi", abi_to_json(abi_of(r.container))},
                      {"disassembly", disassemble(r.container)},
                      {"costReport", cost_report_to_json(cost)},
                      {"errors", Json::array()}}};
  } catch (const SourceError& e) {
    return {200, compile_failure(e.diagnostics())};
  } catch (const KoaError& e) {
    return {200, compile_failure({{Stage::Compile, 0, 0, e.what()}})};
  }
}

ApiResponse api_deploy(Ledger& ledger, const Json& request) {
  if (!request.is_object() || !request.contains("bytecodeHex") ||
      !request["bytecodeHex"].is_string()) {
    return {400, error_body("request body must be {\"bytecodeHex\": string}")};
  }
  std::vector<std::uint8_t> bytes;
  try {
    bytes = from_hex(request["bytecodeHex"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    return {422, error_body(fmt::format("undeployable bytecode: {}", e.what()))};
  }
  try {
    Address a = ledger.deploy(bytes);
    return {200, Json{{"address", address_hex(a)}}};
  } catch (const DeployError& e) {
    if (e.stage() == Stage::Verify) return {422, error_body(e.what())};
    return {500, error_body(e.what())};
  } catch (const LedgerError& e) {
    return {500, error_body(e.what())};
  }
}

ApiResponse api_call(const Ledger& ledger, const Json& request) {
  auto is_str = [&](const char* key) {
    return request.contains(key) && request[key].is_string();
  };
  if (!request.is_object() || !is_str("address") || !is_str("function") ||
      (request.contains("args") && !request["args"].is_array())) {
    return {400, error_body("request body must be {address, function, args: [string]}")};
  }
  auto address = parse_address(request["address"].get<std::string>());
  if (!address) return {400, error_body("address must be 0x followed by 40 hex digits")};

  std::vector<std::string> args;
  if (request.contains("args")) {
    for (const auto& a : request["args"]) {
      if (!a.is_string()) return {400, error_body("args must be strings")};
      args.push_back(a.get<std::string>());
    }
  }
  std::uint64_t gas_limit = kDefaultGasLimit;
  if (request.contains("gasLimit")) {
    if (!request["gasLimit"].is_number_unsigned()) {
      return {400, error_body("gasLimit must be a non-negative integer")};
    }
    gas_limit = request["gasLimit"].get<std::uint64_t>();
  }
  const bool want_trace = request.value("trace", false);
  const auto function = request["function"].get<std::string>();

  std::string return_type = "void";
  if (auto rec = ledger.find(*address)) {
    for (const auto& e : rec->abi) {
      if (e.name == function) return_type = std::string(to_string(e.returns));
    }
  }

  std::vector<TraceEntry> trace;
  Json body{{"ok", false}, {"value", nullptr}, {"type", return_type},
            {"gasUsed", 0},  {"steps", 0},      {"error", nullptr}};
  try {
    ExecutionResult r = ledger.call(*address, function, args, gas_limit,
                                    want_trace ? &trace : nullptr);
    body["ok"] = true;
    if (r.type != Type::Void) body["value"] = render_value(r.value);
    body["gasUsed"] = r.gas_used;
    body["steps"] = r.steps;
  } catch (const CallError& e) {
    body["error"] = e.what();
    int status = e.kind() == CallErrorKind::BadArguments ? 400 : 404;
    return {status, body};
  } catch (const VmError& e) {
    body["error"] = e.what();
    body["gasUsed"] = e.gas_used();
    body["steps"] = e.steps();
  }
  if (want_trace) {
    Json lines = Json::array();
    for (const auto& t : trace) lines.push_back(format_trace(t));
    body["trace"] = lines;
  }
  return {200, body};
}

ApiResponse api_contracts(const Ledger& ledger) {
  Json out = Json::array();
  for (const auto& r : ledger.records()) {
    out.push_back({{"address", address_hex(r.address)},
                   {"abi", abi_to_json(r.abi)},
                   {"deployedAt", r.deployed_at},
                   {"costReport", cost_report_to_json(r.cost_report)}});
  }
  return {200, out};
}

struct HttpService::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)), ledger(config.ledger) {}

  ServiceConfig config;
  Ledger ledger;
  httplib::Server server;
  int port = -1;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body.dump(), "application/json; charset=utf-8");
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    reply(res, {400, error_body(fmt::format("malformed JSON body: {}", e.what()))});
    return std::nullopt;
  }
}

}  // namespace

HttpService::HttpService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto& srv = impl_->server;
  Ledger& ledger = impl_->ledger;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  srv.Post("/api/compile", [](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, api_compile(*body));
  });
  srv.Post("/api/deploy", [&ledger](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, api_deploy(ledger, *body));
  });
  srv.Post("/api/call", [&ledger](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, api_call(ledger, *body));
  });
  srv.Get("/api/contracts", [&ledger](const httplib::Request&, httplib::Response& res) {
    reply(res, api_contracts(ledger));
  });
  srv.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, {200, Json{{"status", "ok"}}});
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_body(fmt::format("HTTP {}", res.status)).dump(),
                      "application/json; charset=utf-8");
    }
  });
  srv.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
          if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        reply(res, {500, error_body(what)});
      });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind() {
  auto& srv = impl_->server;
  if (impl_->config.port == 0) {
    impl_->port = srv.bind_to_any_port(impl_->config.host);
  } else if (srv.bind_to_port(impl_->config.host, impl_->config.port)) {
    impl_->port = impl_->config.port;
  }
  if (impl_->port < 0) {
    throw KoaError(Stage::Usage, fmt::format("cannot bind {}:{}", impl_->config.host,
                                             impl_->config.port));
  }
  return impl_->port;
}

void HttpService::listen() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

Ledger& HttpService::ledger() { return impl_->ledger; }

}  // namespace koa

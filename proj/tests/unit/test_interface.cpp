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

#include <httplib.h>

#include <fmt/core.h>

#include <fstream>
#include <regex>
#include <thread>

#include "koa/cli.hpp"
#include "koa/server.hpp"
#include "process.hpp"

using namespace koa;
using koa::testing::TempDir;

namespace {

constexpr const char* kAdd = "contract Adder { func add(a int, b int) int { return a + b } }";
constexpr const char* kDiv = "contract D { func div(a int, b int) int { return a / b } }";

// Service on a free port, torn down with the fixture.
class RunningService {
 public:
  explicit RunningService(const std::filesystem::path& ledger)
      : service_([&] {
          ServiceConfig c;
          c.port = 0;
          c.ledger = ledger;
          return c;
        }()) {
    port_ = service_.bind();
    thread_ = std::thread([this] { service_.listen(); });
  }
  ~RunningService() {
    service_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c;
  }

 private:
  HttpService service_;
  int port_ = 0;
  std::thread thread_;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expect) {
  auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expect);
  CHECK(res->status != 500);
  CHECK(res->get_header_value("Content-Type").find("application/json") == 0);
  return Json::parse(res->body);
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"koa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("api_compile: add contract") {
  ApiResponse r = api_compile(Json{{"source", kAdd}});
  CHECK(r.status == 200);
  CHECK(r.body["ok"] == true);
  CHECK(r.body["errors"].empty());
  REQUIRE(r.body["abi"].size() == 1);
  CHECK(r.body["abi"][0]["name"] == "add");
  CHECK(r.body["abi"][0]["params"] == Json::array({"int", "int"}));
  CHECK(r.body["abi"][0]["returns"] == "int");
  CHECK(r.body["costReport"]["add"]["worstCaseGas"] == 4);
  CHECK(r.body["costReport"]["add"]["worstCaseSteps"] == 4);
}

TEST_CASE("api_compile: diagnostics are data") {
  ApiResponse r = api_compile(Json{{"source", "contract C {\n  func f() int { return true }\n}"}});
  CHECK(r.status == 200);
  CHECK(r.body["ok"] == false);
  CHECK(r.body["bytecodeHex"] == "");
  REQUIRE(r.body["errors"].size() == 1);
  CHECK(r.body["errors"][0]["stage"] == "type");
  CHECK(r.body["errors"][0]["line"] == 2);

  CHECK(api_compile(Json{{"nope", 1}}).status == 400);
  CHECK(api_compile(Json::array()).status == 400);
}

TEST_CASE("HTTP endpoints") {
  TempDir dir;
  RunningService svc(dir / "ledger.jsonl");
  auto c = svc.client();

  auto health = c.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto empty = c.Get("/api/contracts");
  REQUIRE(empty);
  CHECK(empty->status == 200);
  CHECK(Json::parse(empty->body) == Json::array());

  Json compiled = post(c, "/api/compile", {{"source", kAdd}}, 200);
  Json deployed = post(c, "/api/deploy", {{"bytecodeHex", compiled["bytecodeHex"]}}, 200);
  std::string address = deployed["address"];
  CHECK(std::regex_match(address, std::regex("^0x[0-9a-f]{40}$")));
  CHECK(post(c, "/api/deploy", {{"bytecodeHex", compiled["bytecodeHex"]}}, 200)["address"] == address);

  Json called = post(c, "/api/call", {{"address", address}, {"function", "add"}, {"args", {"1", "2"}}}, 200);
  CHECK(called["ok"] == true);
  CHECK(called["value"] == "3");
  CHECK(called["type"] == "int");
  CHECK(called["gasUsed"] == 4);
  CHECK(called["steps"] == 4);
  CHECK(called["error"].is_null());

  Json traced = post(c, "/api/call",
                     {{"address", address}, {"function", "add"}, {"args", {"1", "2"}}, {"trace", true}}, 200);
  CHECK(traced["trace"].size() == 4);

  // Errors.
  post(c, "/api/call", {{"address", address}, {"function", "nope"}, {"args", Json::array()}}, 404);
  post(c, "/api/call", {{"address", "0x" + std::string(40, '0')}, {"function", "add"}, {"args", {"1", "2"}}}, 404);
  post(c, "/api/call", {{"address", address}, {"function", "add"}, {"args", {"1"}}}, 400);
  post(c, "/api/deploy", {{"bytecodeHex", "zz"}}, 422);
  post(c, "/api/deploy", {{"bytecodeHex", "4b4f4101"}}, 422);
  auto malformed = c.Post("/api/compile", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);
  auto unknown = c.Get("/api/nothing");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
  CHECK(Json::parse(unknown->body).contains("error"));

  // Divide by zero is a result, not a transport failure.
  Json div = post(c, "/api/compile", {{"source", kDiv}}, 200);
  std::string div_addr = post(c, "/api/deploy", {{"bytecodeHex", div["bytecodeHex"]}}, 200)["address"];
  Json failed = post(c, "/api/call", {{"address", div_addr}, {"function", "div"}, {"args", {"1", "0"}}}, 200);
  CHECK(failed["ok"] == false);
  CHECK(failed["value"].is_null());
  CHECK(failed["error"].get<std::string>().rfind("divide by zero at offset ", 0) == 0);
  CHECK(failed["gasUsed"].get<int>() > 0);

  auto listed = c.Get("/api/contracts");
  REQUIRE(listed);
  Json list = Json::parse(listed->body);
  REQUIRE(list.size() == 2);
  CHECK(list[0]["address"] == address);
  CHECK(list[0]["costReport"]["add"]["worstCaseGas"] == 4);
  CHECK(list[0].contains("deployedAt"));
}

TEST_CASE("service restart replays the same contract list") {
  TempDir dir;
  std::string first;
  {
    RunningService svc(dir / "ledger.jsonl");
    auto c = svc.client();
    Json compiled = post(c, "/api/compile", {{"source", kAdd}}, 200);
    post(c, "/api/deploy", {{"bytecodeHex", compiled["bytecodeHex"]}}, 200);
    first = c.Get("/api/contracts")->body;
  }
  RunningService svc(dir / "ledger.jsonl");
  auto c = svc.client();
  CHECK(c.Get("/api/contracts")->body == first);
}

TEST_CASE("cli: compile, deploy, call transcript") {
  TempDir dir;
  write(dir / "add.koa", kAdd);
  const std::string ledger = (dir / "ledger.jsonl").string();

  auto compiled = cli({"compile", (dir / "add.koa").string(), "-o", (dir / "add.kbc").string()});
  CHECK(compiled.code == 0);
  CHECK(std::filesystem::exists(dir / "add.kbc"));

  auto deployed = cli({"deploy", (dir / "add.kbc").string(), "--ledger", ledger});
  CHECK(deployed.code == 0);
  std::string address = deployed.out.substr(0, deployed.out.find('\n'));
  CHECK(std::regex_match(address, std::regex("^0x[0-9a-f]{40}$")));

  auto called = cli({"call", address, "add", "1", "2", "--ledger", ledger});
  CHECK(called.code == 0);
  CHECK(called.out == "3\ngas=4 steps=4\n");

  auto negative = cli({"call", address, "add", "-5", "2", "--ledger", ledger});
  CHECK(negative.out == "-3\ngas=4 steps=4\n");

  auto traced = cli({"call", address, "add", "1", "2", "--ledger", ledger, "--trace"});
  CHECK(traced.err.find("0007 RETURN depth=1 gas=4") != std::string::npos);

  auto listing = cli({"disasm", (dir / "add.kbc").string()});
  CHECK(listing.code == 0);
  CHECK(listing.out.find("0006: ADD") != std::string::npos);

  auto table = cli({"analyze", (dir / "add.koa").string()});
  CHECK(table.code == 0);
  CHECK(table.out.find("add") != std::string::npos);
}

TEST_CASE("cli: exit codes and diagnostics") {
  TempDir dir;
  const std::string ledger = (dir / "ledger.jsonl").string();
  auto unknown = cli({"call", "0xdeadbeefdeadbeefdeadbeefdeadbeefdeadbeef", "add", "1", "2", "--ledger", ledger});
  CHECK(unknown.code == 3);
  CHECK(unknown.err.rfind("error[chain]: unknown address", 0) == 0);

  write(dir / "bad.koa", "contract C {\n  func f() int { return 1 + }\n}\n");
  auto bad = cli({"compile", (dir / "bad.koa").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("error[parse]: " + (dir / "bad.koa").string() + ":2:29 ") == 0);

  write(dir / "div.koa", kDiv);
  CHECK(cli({"compile", (dir / "div.koa").string(), "-o", (dir / "div.kbc").string()}).code == 0);
  auto d = cli({"deploy", (dir / "div.kbc").string(), "--ledger", ledger});
  std::string addr = d.out.substr(0, d.out.find('\n'));
  auto trap = cli({"call", addr, "div", "1", "0", "--ledger", ledger});
  CHECK(trap.code == 3);
  CHECK(trap.err.rfind("error[vm]: divide by zero at offset", 0) == 0);

  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"call", "0x12", "add", "--ledger", ledger}).code == 1);
  CHECK(cli({"compile", (dir / "missing.koa").string()}).code == 1);
}

TEST_CASE("cli and HTTP report the same diagnostic positions") {
  TempDir dir;
  const std::vector<std::string> sources{
      "contract C {\n  func f() int { return 1 + }\n}\n",
      "contract C {\n  func f() int {\n    let x int = true\n    return x\n  }\n}\n",
      "contract C { func f() int { return f() } }",
      "contract C { func f() int { return \"unterminated } }",
      "contract C { func f() int { if true { return 1 } } }",
  };
  for (const auto& src : sources) {
    write(dir / "x.koa", src);
    auto run = cli({"compile", (dir / "x.koa").string()});
    Json http = api_compile(Json{{"source", src}}).body;
    REQUIRE(http["ok"] == false);
    std::vector<std::string> expected;
    for (const auto& e : http["errors"]) {
      expected.push_back(fmt::format("error[{}]: {}:{}:{} {}", e["stage"].get<std::string>(),
                                     (dir / "x.koa").string(), e["line"].get<int>(),
                                     e["col"].get<int>(), e["message"].get<std::string>()));
    }
    std::vector<std::string> lines;
    std::istringstream in(run.err);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    INFO(src);
    CHECK(lines == expected);
  }
}

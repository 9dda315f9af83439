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

#include <openssl/sha.h>

#include <fstream>
#include <iterator>
#include <regex>

#include "koa/chain.hpp"
#include "koa/pipeline.hpp"
#include "process.hpp"

using namespace koa;
using koa::testing::TempDir;

namespace {

constexpr const char* kAdd = "contract Adder { func add(a int, b int) int { return a + b } }";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("address_of is the SHA-256 prefix") {
  auto r = compile_source(kAdd);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(r.bytes.data(), r.bytes.size(), digest);
  Address a = address_of(r.bytes);
  CHECK(std::equal(a.begin(), a.end(), digest));
  std::string hex = address_hex(a);
  CHECK(std::regex_match(hex, std::regex("^0x[0-9a-f]{40}$")));
  CHECK(parse_address(hex) == a);
  CHECK(!parse_address("0x12"));

  auto other = r.bytes;
  other.back() ^= 1;
  CHECK(address_of(other) != a);
}

TEST_CASE("deploy is idempotent and call resolves by name") {
  TempDir dir;
  Ledger ledger(dir / "ledger.jsonl");
  auto r = compile_source(kAdd);
  Address a1 = ledger.deploy(r.bytes);
  std::string after_first = slurp(dir / "ledger.jsonl");
  Address a2 = ledger.deploy(r.bytes);
  CHECK(a1 == a2);
  CHECK(ledger.records().size() == 1);
  CHECK(slurp(dir / "ledger.jsonl") == after_first);

  auto res = ledger.call(a1, "add", {"1", "2"}, 1000);
  CHECK(std::get<std::int64_t>(res.value) == 3);
  CHECK(res.gas_used == 4);
  // Calls never touch the file.
  CHECK(slurp(dir / "ledger.jsonl") == after_first);
}

TEST_CASE("call errors") {
  TempDir dir;
  Ledger ledger(dir / "ledger.jsonl");
  Address zero{};
  try {
    (void)ledger.call(zero, "add", {"1", "2"}, 1000);
    FAIL("expected CallError");
  } catch (const CallError& e) {
    CHECK(e.kind() == CallErrorKind::UnknownAddress);
  }
  Address a = ledger.deploy(compile_source(kAdd).bytes);
  auto kind_of = [&](std::string_view fn, std::vector<std::string> args) {
    try {
      (void)ledger.call(a, fn, args, 1000);
    } catch (const CallError& e) {
      return e.kind();
    }
    FAIL("expected CallError");
    return CallErrorKind::UnknownAddress;
  };
  CHECK(kind_of("add", {"1"}) == CallErrorKind::BadArguments);
  CHECK(kind_of("add", {"1", "x"}) == CallErrorKind::BadArguments);
  CHECK(kind_of("sub", {"1", "2"}) == CallErrorKind::UnknownFunction);
}

TEST_CASE("deploy rejects unverifiable bytes and leaves the ledger unchanged") {
  TempDir dir;
  Ledger ledger(dir / "ledger.jsonl");
  auto bytes = compile_source(kAdd).bytes;
  bytes.back() = 0xEE;  // RETURN -> undefined opcode
  CHECK_THROWS_AS((void)ledger.deploy(bytes), DeployError);
  CHECK(ledger.records().empty());
  CHECK(!std::filesystem::exists(dir / "ledger.jsonl"));
}

TEST_CASE("ledger persistence") {
  TempDir dir;
  CHECK(load_ledger(dir / "missing.jsonl").empty());

  const auto path = dir / "ledger.jsonl";
  std::vector<DeploymentRecord> written;
  {
    Ledger ledger(path);
    (void)ledger.deploy(compile_source(kAdd).bytes);
    (void)ledger.deploy(compile_source(
        "contract G { func greet(s string) string { return s } func no() bool { return false } }").bytes);
    written = ledger.records();
  }
  auto loaded = load_ledger(path);
  CHECK(loaded == written);
  Ledger reopened(path);
  CHECK(reopened.records() == written);
  CHECK(std::get<std::string>(reopened.call(written[1].address, "greet", {"hi"}, 100).value) == "hi");

  // Truncated final line.
  std::string text = slurp(path);
  text.resize(text.size() - 10);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
  }
  try {
    (void)load_ledger(path);
    FAIL("expected LedgerError");
  } catch (const LedgerError& e) {
    CHECK(e.line_number() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("record lines roundtrip") {
  TempDir dir;
  Ledger ledger(dir / "l.jsonl");
  (void)ledger.deploy(compile_source(kAdd).bytes);
  const auto rec = ledger.records().at(0);
  CHECK(record_from_line(record_to_line(rec), 1) == rec);
  CHECK(std::regex_match(rec.deployed_at,
                         std::regex(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$)")));
}

TEST_CASE("coerce_argument") {
  CHECK(coerce_argument("-12", Type::Int, 0, "f") == Value{std::int64_t{-12}});
  CHECK(coerce_argument("true", Type::Bool, 0, "f") == Value{true});
  CHECK(coerce_argument("a b", Type::String, 0, "f") == Value{std::string{"a b"}});
  CHECK_THROWS_AS((void)coerce_argument("1.5", Type::Int, 0, "f"), CallError);
  CHECK_THROWS_AS((void)coerce_argument("99999999999999999999", Type::Int, 0, "f"), CallError);
  CHECK_THROWS_AS((void)coerce_argument("yes", Type::Bool, 0, "f"), CallError);
}

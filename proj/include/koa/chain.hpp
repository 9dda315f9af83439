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

#ifndef KOA_CHAIN_HPP
#define KOA_CHAIN_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "koa/analysis.hpp"
#include "koa/bytecode.hpp"
#include "koa/vm.hpp"

namespace koa {

/// First 20 bytes of SHA-256 over the container bytes.
using Address = std::array<std::uint8_t, 20>;

Address address_of(std::span<const std::uint8_t> container_bytes);
std::string address_hex(const Address& a);  // "0x" + 40 lowercase hex digits
std::optional<Address> parse_address(std::string_view text);

struct AbiEntry {
  std::string name;
  std::vector<Type> params;
  Type returns = Type::Void;
  Selector selector{};

  friend bool operator==(const AbiEntry&, const AbiEntry&) = default;
};

std::vector<AbiEntry> abi_of(const Container& container);

struct DeploymentRecord {
  Address address{};
  std::vector<std::uint8_t> container;
  std::vector<AbiEntry> abi;
  std::string deployed_at;  // RFC 3339, UTC
  CostReport cost_report;

  friend bool operator==(const DeploymentRecord&, const DeploymentRecord&) = default;
};

/// Stage is Verify when the bytecode itself was rejected, Chain for ledger
/// I/O failures.
class DeployError : public KoaError {
 public:
  explicit DeployError(const std::string& what, Stage stage = Stage::Chain)
      : KoaError(stage, what) {}
};

enum class CallErrorKind { UnknownAddress, UnknownFunction, BadArguments };

class CallError : public KoaError {
 public:
  CallError(CallErrorKind kind, const std::string& what)
      : KoaError(Stage::Chain, what), kind_(kind) {}
  [[nodiscard]] CallErrorKind kind() const { return kind_; }

 private:
  CallErrorKind kind_;
};

class LedgerError : public KoaError {
 public:
  LedgerError(std::size_t line_number, const std::string& reason);
  [[nodiscard]] std::size_t line_number() const { return line_number_; }

 private:
  std::size_t line_number_;
};

/// One JSON object per line: address, container_hex, abi, deployed_at,
/// cost_report.
std::string record_to_line(const DeploymentRecord& record);
DeploymentRecord record_from_line(std::string_view line, std::size_t line_number);

/// Reads a ledger file; a missing file is an empty ledger.
std::vector<DeploymentRecord> load_ledger(const std::filesystem::path& path);

/// Appends one record and fsyncs before returning.
void persist(const std::filesystem::path& path, const DeploymentRecord& record);

/// Textual call argument converted per the parameter type. Throws
/// CallError(BadArguments).
Value coerce_argument(std::string_view text, Type type, std::size_t position,
                      std::string_view function);

/// Single-node deployment registry backed by an append-only ledger file.
/// Deploys are serialized (in-process mutex plus an advisory file lock);
/// calls only read.
class Ledger {
 public:
  explicit Ledger(std::filesystem::path path);

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  /// Decodes, verifies and analyzes `bytes`, then records them under their
  /// content address. Deploying the same bytes again returns the same
  /// address without writing. Throws DeployError.
  Address deploy(std::span<const std::uint8_t> bytes);

  /// Resolves `function` through the stored ABI, coerces `args` and runs the
  /// VM. Never writes to the ledger. Throws CallError or VmError.
  ExecutionResult call(const Address& address, std::string_view function,
                       const std::vector<std::string>& args, std::uint64_t gas_limit,
                       std::vector<TraceEntry>* trace = nullptr) const;

  [[nodiscard]] std::optional<DeploymentRecord> find(const Address& address) const;
  [[nodiscard]] std::vector<DeploymentRecord> records() const;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  void adopt(DeploymentRecord record);
  void reload_locked();

  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::vector<DeploymentRecord> records_;
  std::map<Address, std::size_t> index_;
  std::map<Address, Container> decoded_;
};

/// Current time as RFC 3339 UTC, second precision.
std::string utc_timestamp();

}  // namespace koa

#endif  // KOA_CHAIN_HPP

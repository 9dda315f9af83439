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

#include "koa/chain.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <ctime>
#include <fstream>
#include <mutex>

#include <fmt/core.h>

#include "koa/json_io.hpp"
#include "koa/sha256.hpp"
#include "koa/verifier.hpp"

namespace koa {

Address address_of(std::span<const std::uint8_t> bytes) {
  Digest d = sha256(bytes);
  Address a{};
  std::copy_n(d.begin(), a.size(), a.begin());
  return a;
}

std::string address_hex(const Address& a) { return "0x" + to_hex(a); }

std::optional<Address> parse_address(std::string_view text) {
  if (!text.starts_with("0x") || text.size() != 42) return std::nullopt;
  try {
    auto bytes = from_hex(text);
    Address a{};
    std::copy(bytes.begin(), bytes.end(), a.begin());
    return a;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::vector<AbiEntry> abi_of(const Container& c) {
  std::vector<AbiEntry> out;
  for (const auto& f : c.functions) out.push_back({f.name, f.params, f.return_type, f.selector});
  return out;
}

LedgerError::LedgerError(std::size_t line_number, const std::string& reason)
    : KoaError(Stage::Chain, fmt::format("ledger line {}: {}", line_number, reason)),
      line_number_(line_number) {}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string record_to_line(const DeploymentRecord& r) {
  Json j = {
      {"address", address_hex(r.address)},
      {"container_hex", to_hex(r.container)},
      {"abi", abi_to_json(r.abi)},
      {"deployed_at", r.deployed_at},
      {"cost_report", cost_report_to_json(r.cost_report)},
  };
  return j.dump();
}

DeploymentRecord record_from_line(std::string_view line, std::size_t line_number) {
  try {
    Json j = Json::parse(line);
    DeploymentRecord r;
    auto addr = parse_address(j.at("address").get<std::string>());
    if (!addr) throw LedgerError(line_number, "malformed address");
    r.address = *addr;
    r.container = from_hex(j.at("container_hex").get<std::string>());
    if (address_of(r.container) != r.address) {
      throw LedgerError(line_number, "address does not match container digest");
    }
    r.abi = abi_from_json(j.at("abi"));
    r.deployed_at = j.at("deployed_at").get<std::string>();
    r.cost_report = cost_report_from_json(j.at("cost_report"));
    return r;
  } catch (const LedgerError&) {
    throw;
  } catch (const std::exception& e) {
    throw LedgerError(line_number, e.what());
  }
}

std::vector<DeploymentRecord> load_ledger(const std::filesystem::path& path) {
  std::vector<DeploymentRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return out;
    throw LedgerError(0, fmt::format("cannot read {}", path.string()));
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    ++line_number;
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) {
      throw LedgerError(line_number, "truncated record (no line terminator)");
    }
    std::string_view line(content.data() + start, end - start);
    if (!line.empty()) out.push_back(record_from_line(line, line_number));
    start = end + 1;
  }
  return out;
}

namespace {

class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw DeployError(fmt::format("cannot open ledger {}: {}", path.string(),
                                    std::strerror(errno)));
    }
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw DeployError(fmt::format("cannot lock ledger: {}", std::strerror(errno)));
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

  [[nodiscard]] int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

void write_line(int fd, const std::string& text) {
  std::string line = text + "\n";
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw DeployError(fmt::format("ledger write failed: {}", std::strerror(errno)));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    throw DeployError(fmt::format("ledger fsync failed: {}", std::strerror(errno)));
  }
}

}  // namespace

void persist(const std::filesystem::path& path, const DeploymentRecord& record) {
  FileLock lock(path);
  write_line(lock.fd(), record_to_line(record));
}

Value coerce_argument(std::string_view text, Type type, std::size_t position,
                      std::string_view function) {
  auto bad = [&](std::string_view what) {
    return CallError(CallErrorKind::BadArguments,
                     fmt::format("argument {} of '{}': '{}' is not {}", position + 1, function,
                                 text, what));
  };
  switch (type) {
    case Type::Int: {
      std::int64_t v = 0;
      std::string_view digits = text;
      if (digits.starts_with('+')) digits.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw bad("an int");
      }
      return v;
    }
    case Type::Bool:
      if (text == "true") return true;
      if (text == "false") return false;
      throw bad("a bool (true|false)");
    case Type::String:
      return std::string(text);
    case Type::Void:
      break;
  }
  throw bad("a value");
}

Ledger::Ledger(std::filesystem::path path) : path_(std::move(path)) {
  for (auto& r : load_ledger(path_)) adopt(std::move(r));
}

void Ledger::adopt(DeploymentRecord record) {
  if (index_.contains(record.address)) return;
  decoded_.emplace(record.address, decode(record.container));
  index_.emplace(record.address, records_.size());
  records_.push_back(std::move(record));
}

void Ledger::reload_locked() {
  for (auto& r : load_ledger(path_)) adopt(std::move(r));
}

Address Ledger::deploy(std::span<const std::uint8_t> bytes) {
  DeploymentRecord record;
  Container container;
  try {
    container = decode(bytes);
    record.cost_report = analyze(container);
  } catch (const KoaError& e) {
    throw DeployError(fmt::format("undeployable bytecode: {}", e.what()), Stage::Verify);
  }
  record.address = address_of(bytes);
  record.container.assign(bytes.begin(), bytes.end());
  record.abi = abi_of(container);

  std::unique_lock guard(mu_);
  FileLock lock(path_);
  // Pick up records other processes appended since we loaded.
  reload_locked();
  if (index_.contains(record.address)) return record.address;
  record.deployed_at = utc_timestamp();
  write_line(lock.fd(), record_to_line(record));
  adopt(std::move(record));
  return records_.back().address;
}

ExecutionResult Ledger::call(const Address& address, std::string_view function,
                             const std::vector<std::string>& args, std::uint64_t gas_limit,
                             std::vector<TraceEntry>* trace) const {
  std::shared_lock guard(mu_);
  auto it = decoded_.find(address);
  if (it == decoded_.end()) {
    throw CallError(CallErrorKind::UnknownAddress,
                    fmt::format("unknown address {}", address_hex(address)));
  }
  const Container& c = it->second;
  const FunctionAbi* fn = c.find(function);
  if (fn == nullptr) {
    throw CallError(CallErrorKind::UnknownFunction,
                    fmt::format("unknown function '{}' at {}", function, address_hex(address)));
  }
  if (args.size() != fn->params.size()) {
    throw CallError(CallErrorKind::BadArguments,
                    fmt::format("'{}' expects {} argument(s), got {}", fn->name,
                                fn->params.size(), args.size()));
  }
  CallData call{fn->selector, {}};
  for (std::size_t i = 0; i < args.size(); ++i) {
    call.args.push_back(coerce_argument(args[i], fn->params[i], i, fn->name));
  }
  return execute(c, call, gas_limit, GasSchedule(), trace);
}

std::optional<DeploymentRecord> Ledger::find(const Address& address) const {
  std::shared_lock guard(mu_);
  auto it = index_.find(address);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

std::vector<DeploymentRecord> Ledger::records() const {
  std::shared_lock guard(mu_);
  return records_;
}

}  // namespace koa

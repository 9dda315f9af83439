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

#include "koa/bytecode.hpp"

#include <stdexcept>

#include <fmt/core.h>

#include "koa/sha256.hpp"

namespace koa {

namespace {

const std::vector<OpcodeInfo> kOpcodes = {
    {Opcode::PUSH, "PUSH", 8, 0, 1},     {Opcode::POP, "POP", 0, 1, 0},
    {Opcode::ADD, "ADD", 0, 2, 1},       {Opcode::SUB, "SUB", 0, 2, 1},
    {Opcode::MUL, "MUL", 0, 2, 1},       {Opcode::DIV, "DIV", 0, 2, 1},
    {Opcode::MOD, "MOD", 0, 2, 1},       {Opcode::EQ, "EQ", 0, 2, 1},
    {Opcode::NEQ, "NEQ", 0, 2, 1},       {Opcode::LT, "LT", 0, 2, 1},
    {Opcode::LTE, "LTE", 0, 2, 1},       {Opcode::GT, "GT", 0, 2, 1},
    {Opcode::GTE, "GTE", 0, 2, 1},       {Opcode::AND, "AND", 0, 2, 1},
    {Opcode::OR, "OR", 0, 2, 1},         {Opcode::NOT, "NOT", 0, 1, 1},
    {Opcode::NEG, "NEG", 0, 1, 1},       {Opcode::JUMP, "JUMP", 4, 0, 0},
    {Opcode::JUMPF, "JUMPF", 4, 1, 0},   {Opcode::MLOAD, "MLOAD", 2, 0, 1},
    {Opcode::MSTORE, "MSTORE", 2, 1, 0}, {Opcode::SPUSH, "SPUSH", 4, 0, 1},
    {Opcode::SEQ, "SEQ", 0, 2, 1},       {Opcode::LOADARG, "LOADARG", 2, 0, 1},
    {Opcode::RETURN, "RETURN", 0, 0, 0}, {Opcode::HALT, "HALT", 0, 0, 0},
};

const std::array<const OpcodeInfo*, 256> kByByte = [] {
  std::array<const OpcodeInfo*, 256> table{};
  for (const auto& info : kOpcodes) table[static_cast<std::uint8_t>(info.op)] = &info;
  return table;
}();

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void bytes(std::span<const std::uint8_t> s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }

  void need(std::size_t n, std::string_view what) const {
    if (in_.size() - pos_ < n) {
      throw DecodeError(pos_, fmt::format("truncated {}", what));
    }
  }
  std::uint64_t le(int width, std::string_view what) {
    need(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n, std::string_view what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool valid_value_tag(std::uint8_t tag) { return tag <= 2; }

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

}  // namespace

const OpcodeInfo* opcode_info(std::uint8_t byte) { return kByByte[byte]; }

const OpcodeInfo& opcode_info(Opcode op) { return *kByByte[static_cast<std::uint8_t>(op)]; }

std::optional<Opcode> opcode_from_mnemonic(std::string_view mnemonic) {
  for (const auto& info : kOpcodes) {
    if (info.mnemonic == mnemonic) return info.op;
  }
  return std::nullopt;
}

const std::vector<OpcodeInfo>& all_opcodes() { return kOpcodes; }

void encode_instruction(std::vector<std::uint8_t>& code, Opcode op, std::uint64_t imm) {
  Writer w(code);
  w.u8(static_cast<std::uint8_t>(op));
  w.le(imm, opcode_info(op).imm_width);
}

std::optional<Instruction> decode_instruction(std::span<const std::uint8_t> code,
                                              std::uint32_t offset, std::uint32_t end) {
  if (offset >= end || end > code.size()) return std::nullopt;
  const OpcodeInfo* info = opcode_info(code[offset]);
  if (info == nullptr) return std::nullopt;
  if (std::uint64_t{offset} + 1 + info->imm_width > end) return std::nullopt;
  Instruction ins{offset, info->op, 0};
  for (int i = 0; i < info->imm_width; ++i) {
    ins.imm |= std::uint64_t{code[offset + 1 + i]} << (8 * i);
  }
  return ins;
}

std::string selector_hex(const Selector& sel) { return to_hex(sel); }

std::optional<Selector> parse_selector(std::string_view hex) {
  if (hex.starts_with("0x")) hex.remove_prefix(2);
  if (hex.size() != 8) return std::nullopt;
  try {
    auto bytes = from_hex(hex);
    return Selector{bytes[0], bytes[1], bytes[2], bytes[3]};
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::string signature_string(std::string_view name, std::span<const Type> params) {
  std::string sig(name);
  sig += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) sig += ',';
    sig += to_string(params[i]);
  }
  sig += ')';
  return sig;
}

Selector selector(std::string_view name, std::span<const Type> params) {
  Digest d = sha256(signature_string(name, params));
  return {d[0], d[1], d[2], d[3]};
}

const FunctionAbi* Container::find(const Selector& sel) const {
  for (const auto& f : functions) {
    if (f.selector == sel) return &f;
  }
  return nullptr;
}

const FunctionAbi* Container::find(std::string_view name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

DecodeError::DecodeError(std::size_t offset, const std::string& reason)
    : KoaError(Stage::Verify, fmt::format("malformed container at byte {}: {}", offset, reason)),
      offset_(offset) {}

std::vector<std::uint8_t> encode(const Container& c) {
  if (c.constants.size() > 0xFFFF) throw std::length_error("too many constants");
  if (c.functions.size() > 0xFFFF) throw std::length_error("too many functions");
  if (c.code.size() > 0xFFFFFFFFu) throw std::length_error("code section too large");

  std::vector<std::uint8_t> out;
  Writer w(out);
  w.bytes(kMagic);
  w.le(c.constants.size(), 2);
  for (const auto& s : c.constants) {
    w.le(s.size(), 4);
    w.bytes(s);
  }
  w.le(c.functions.size(), 2);
  for (const auto& f : c.functions) {
    if (f.name.size() > 0xFFFF || f.params.size() > 0xFF) {
      throw std::length_error("function entry too large");
    }
    w.bytes(f.selector);
    w.le(f.name.size(), 2);
    w.bytes(f.name);
    w.u8(static_cast<std::uint8_t>(f.params.size()));
    for (Type t : f.params) w.u8(static_cast<std::uint8_t>(t));
    w.u8(static_cast<std::uint8_t>(f.return_type));
    w.le(f.code_offset, 4);
    w.le(f.code_length, 4);
  }
  w.le(c.code.size(), 4);
  w.bytes(c.code);
  return out;
}

Container decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw DecodeError(0, "bad magic (expected 4B 4F 41 01)");
  }
  Container c;
  const auto nconst = r.le(2, "constant count");
  for (std::uint64_t i = 0; i < nconst; ++i) {
    auto len = r.le(4, "constant length");
    auto body = r.take(len, "constant bytes");
    c.constants.emplace_back(body.begin(), body.end());
  }
  const auto nfunc = r.le(2, "function count");
  for (std::uint64_t i = 0; i < nfunc; ++i) {
    FunctionAbi f;
    auto sel = r.take(4, "selector");
    std::copy(sel.begin(), sel.end(), f.selector.begin());
    const std::size_t name_at = r.pos();
    auto name_len = r.le(2, "name length");
    auto name = r.take(name_len, "function name");
    f.name.assign(name.begin(), name.end());
    if (!valid_identifier(f.name)) throw DecodeError(name_at, "invalid function name");
    auto nparams = r.le(1, "parameter count");
    for (std::uint64_t p = 0; p < nparams; ++p) {
      const std::size_t at = r.pos();
      auto tag = static_cast<std::uint8_t>(r.le(1, "parameter tag"));
      if (!valid_value_tag(tag)) {
        throw DecodeError(at, fmt::format("invalid parameter type tag {}", tag));
      }
      f.params.push_back(static_cast<Type>(tag));
    }
    const std::size_t at = r.pos();
    auto ret = static_cast<std::uint8_t>(r.le(1, "return tag"));
    if (!valid_value_tag(ret) && ret != 255) {
      throw DecodeError(at, fmt::format("invalid return type tag {}", ret));
    }
    f.return_type = static_cast<Type>(ret);
    f.code_offset = static_cast<std::uint32_t>(r.le(4, "code offset"));
    f.code_length = static_cast<std::uint32_t>(r.le(4, "code length"));
    c.functions.push_back(std::move(f));
  }
  auto code_size = r.le(4, "code size");
  auto code = r.take(code_size, "code");
  c.code.assign(code.begin(), code.end());
  if (!r.done()) throw DecodeError(r.pos(), "trailing bytes after code section");
  return c;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

}  // namespace koa

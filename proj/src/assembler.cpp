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

#include "koa/assembler.hpp"

#include <charconv>
#include <limits>
#include <sstream>

#include <fmt/core.h>

#include "koa/verifier.hpp"

namespace koa {

AssembleError::AssembleError(int line, const std::string& message)
    : KoaError(Stage::Compile, fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

std::string quote_listing(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    auto b = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (b < 0x20 || b == 0x7f) {
          out += fmt::format("\\x{:02x}", b);
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string type_list(const FunctionAbi& f) {
  std::string out;
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += ',';
    out += to_string(f.params[i]);
  }
  return out;
}

std::string render_imm(const Instruction& i) {
  if (i.op == Opcode::PUSH) return std::to_string(static_cast<std::int64_t>(i.imm));
  return std::to_string(i.imm);
}

}  // namespace

std::string disassemble(const Container& c) {
  std::string out;
  for (std::size_t i = 0; i < c.constants.size(); ++i) {
    out += fmt::format(".const {} {}\n", i, quote_listing(c.constants[i]));
  }
  for (const auto& f : c.functions) {
    out += fmt::format(".func {}({}) -> {} selector={} offset={} length={}\n", f.name,
                       type_list(f), to_string(f.return_type), selector_hex(f.selector),
                       f.code_offset, f.code_length);
  }

  std::uint32_t pc = 0;
  const auto size = static_cast<std::uint32_t>(c.code.size());
  while (pc < size) {
    for (const auto& f : c.functions) {
      if (f.code_offset == pc) out += fmt::format("; {}\n", f.name);
    }
    auto ins = decode_instruction(c.code, pc, size);
    if (!ins) {
      // Not an instruction; keep the byte so the listing still reassembles.
      out += fmt::format("{:04}: .byte {}\n", pc, c.code[pc]);
      ++pc;
      continue;
    }
    const OpcodeInfo& info = opcode_info(ins->op);
    if (info.imm_width == 0) {
      out += fmt::format("{:04}: {}\n", pc, info.mnemonic);
    } else if (ins->op == Opcode::SPUSH && ins->imm < c.constants.size()) {
      out += fmt::format("{:04}: {} {} ; {}\n", pc, info.mnemonic, render_imm(*ins),
                         quote_listing(c.constants[ins->imm]));
    } else {
      out += fmt::format("{:04}: {} {}\n", pc, info.mnemonic, render_imm(*ins));
    }
    pc = ins->next();
  }
  return out;
}

namespace {

class Assembler {
 public:
  Container run(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_;
      line(text.substr(start, end - start));
      start = end + 1;
    }
    finish();
    return std::move(out_);
  }

 private:
  struct PendingRegion {
    std::size_t function;
    std::uint32_t start;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw AssembleError(line_, msg); }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
      s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  }

  static std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (in_string && s[i] == '\\') {
        ++i;
      } else if (s[i] == '"') {
        in_string = !in_string;
      } else if (s[i] == ';' && !in_string) {
        return s.substr(0, i);
      }
    }
    return s;
  }

  std::string_view word(std::string_view& s) const {
    s = trim(s);
    std::size_t n = 0;
    while (n < s.size() && s[n] != ' ' && s[n] != '\t') ++n;
    auto w = s.substr(0, n);
    s.remove_prefix(n);
    return w;
  }

  std::uint64_t number(std::string_view s, bool allow_negative, std::uint64_t max) const {
    bool neg = false;
    if (!s.empty() && s[0] == '-') {
      if (!allow_negative) fail(fmt::format("immediate out of range: {}", s));
      neg = true;
      s.remove_prefix(1);
    }
    int base = 10;
    if (s.starts_with("0x") || s.starts_with("0X")) {
      base = 16;
      s.remove_prefix(2);
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec == std::errc::result_out_of_range) fail(fmt::format("immediate out of range: {}", s));
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail(fmt::format("invalid number '{}'", s));
    }
    if (neg) {
      constexpr std::uint64_t kMinMagnitude = std::uint64_t{1} << 63;
      if (v > kMinMagnitude) fail(fmt::format("immediate out of range: -{}", s));
      return ~v + 1;
    }
    if (v > max) fail(fmt::format("immediate out of range: {}", s));
    return v;
  }

  std::string unquote(std::string_view s) const {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') fail("expected quoted string");
    s = s.substr(1, s.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '\\') {
        out.push_back(s[i]);
        continue;
      }
      if (++i >= s.size()) fail("dangling escape in string");
      switch (s[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'x': {
          if (i + 2 >= s.size()) fail("bad \\x escape");
          auto hex = s.substr(i + 1, 2);
          unsigned v = 0;
          auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
          if (ec != std::errc() || p != hex.data() + 2) fail("bad \\x escape");
          out.push_back(static_cast<char>(v));
          i += 2;
          break;
        }
        default: fail(fmt::format("unknown escape '\\{}'", s[i]));
      }
    }
    return out;
  }

  static std::optional<Type> parse_type(std::string_view s) {
    if (s == "int") return Type::Int;
    if (s == "bool") return Type::Bool;
    if (s == "string") return Type::String;
    if (s == "void") return Type::Void;
    return std::nullopt;
  }

  void line(std::string_view raw) {
    std::string_view s = trim(strip_comment(raw));
    if (s.empty()) return;
    if (s.starts_with(".const")) return constant(s.substr(6));
    if (s.starts_with(".func")) return function(s.substr(5));

    // Optional "OFFSET:" prefix.
    if (auto colon = s.find(':'); colon != std::string_view::npos) {
      auto label = trim(s.substr(0, colon));
      auto offset = number(label, false, std::numeric_limits<std::uint32_t>::max());
      if (offset != out_.code.size()) {
        fail(fmt::format("offset {} does not match position {}", offset, out_.code.size()));
      }
      s = trim(s.substr(colon + 1));
    }
    std::string_view rest = s;
    std::string_view mnemonic = word(rest);
    rest = trim(rest);
    if (mnemonic == ".byte") {
      out_.code.push_back(static_cast<std::uint8_t>(number(rest, false, 0xFF)));
      return;
    }
    auto op = opcode_from_mnemonic(mnemonic);
    if (!op) fail(fmt::format("unknown mnemonic '{}'", mnemonic));
    const OpcodeInfo& info = opcode_info(*op);
    std::uint64_t imm = 0;
    if (info.imm_width == 0) {
      if (!rest.empty()) fail(fmt::format("{} takes no immediate", mnemonic));
    } else {
      std::string_view arg = word(rest);
      if (arg.empty()) fail(fmt::format("{} requires an immediate", mnemonic));
      if (!trim(rest).empty()) fail("unexpected trailing text");
      std::uint64_t max = info.imm_width == 8 ? std::numeric_limits<std::uint64_t>::max()
                                              : (std::uint64_t{1} << (8 * info.imm_width)) - 1;
      imm = number(arg, *op == Opcode::PUSH, max);
    }
    encode_instruction(out_.code, *op, imm);
  }

  void constant(std::string_view s) {
    s = trim(s);
    if (!s.starts_with('"')) {
      std::string_view rest = s;
      auto index = number(word(rest), false, 0xFFFF);
      if (index != out_.constants.size()) {
        fail(fmt::format("constant index {} out of sequence", index));
      }
      s = trim(rest);
    }
    out_.constants.push_back(unquote(s));
  }

  // name(types) -> ret [selector=hex] [offset=N length=M]
  void function(std::string_view s) {
    s = trim(s);
    auto open = s.find('(');
    auto close = s.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      fail("expected .func name(types) -> type");
    }
    FunctionAbi f;
    f.name = std::string(trim(s.substr(0, open)));
    if (f.name.empty()) fail("missing function name");
    std::string_view params = s.substr(open + 1, close - open - 1);
    while (!trim(params).empty()) {
      auto comma = params.find(',');
      auto t = parse_type(trim(params.substr(0, comma)));
      if (!t || *t == Type::Void) fail("invalid parameter type");
      f.params.push_back(*t);
      if (comma == std::string_view::npos) break;
      params.remove_prefix(comma + 1);
    }
    std::string_view rest = trim(s.substr(close + 1));
    if (!rest.starts_with("->")) fail("expected '->' and a return type");
    rest.remove_prefix(2);
    auto ret = parse_type(word(rest));
    if (!ret) fail("invalid return type");
    f.return_type = *ret;

    bool has_selector = false;
    std::optional<std::uint32_t> offset;
    std::optional<std::uint32_t> length;
    for (auto attr = word(rest); !attr.empty(); attr = word(rest)) {
      auto eq = attr.find('=');
      if (eq == std::string_view::npos) fail(fmt::format("bad attribute '{}'", attr));
      auto key = attr.substr(0, eq);
      auto value = attr.substr(eq + 1);
      if (key == "selector") {
        auto sel = parse_selector(value);
        if (!sel) fail("selector must be 8 hex digits");
        f.selector = *sel;
        has_selector = true;
      } else if (key == "offset") {
        offset = static_cast<std::uint32_t>(number(value, false, 0xFFFFFFFFu));
      } else if (key == "length") {
        length = static_cast<std::uint32_t>(number(value, false, 0xFFFFFFFFu));
      } else {
        fail(fmt::format("unknown attribute '{}'", key));
      }
    }
    if (!has_selector) f.selector = selector(f.name, f.params);
    if (offset.has_value() != length.has_value()) fail("offset and length go together");
    if (offset) {
      f.code_offset = *offset;
      f.code_length = *length;
    } else {
      pending_.push_back({out_.functions.size(), static_cast<std::uint32_t>(out_.code.size())});
    }
    out_.functions.push_back(std::move(f));
  }

  void finish() {
    const auto size = static_cast<std::uint32_t>(out_.code.size());
    if (out_.functions.empty()) {
      FunctionAbi main;
      main.name = "main";
      main.return_type = Type::Int;
      main.selector = selector(main.name, main.params);
      main.code_offset = 0;
      main.code_length = size;
      out_.functions.push_back(std::move(main));
      return;
    }
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      std::uint32_t end = i + 1 < pending_.size() ? pending_[i + 1].start : size;
      auto& f = out_.functions[pending_[i].function];
      f.code_offset = pending_[i].start;
      f.code_length = end - pending_[i].start;
    }
  }

  Container out_;
  std::vector<PendingRegion> pending_;
  int line_ = 0;
};

}  // namespace

Container assemble(std::string_view text) { return Assembler().run(text); }

}  // namespace koa

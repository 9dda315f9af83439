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

#ifndef KOA_BYTECODE_HPP
#define KOA_BYTECODE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "koa/ast.hpp"
#include "koa/diagnostics.hpp"

namespace koa {

enum class Opcode : std::uint8_t {
  PUSH = 0x01,
  POP = 0x02,
  ADD = 0x10,
  SUB = 0x11,
  MUL = 0x12,
  DIV = 0x13,
  MOD = 0x14,
  EQ = 0x20,
  NEQ = 0x21,
  LT = 0x22,
  LTE = 0x23,
  GT = 0x24,
  GTE = 0x25,
  AND = 0x30,
  OR = 0x31,
  NOT = 0x32,
  NEG = 0x33,
  JUMP = 0x40,
  JUMPF = 0x41,
  MLOAD = 0x50,
  MSTORE = 0x51,
  SPUSH = 0x60,
  SEQ = 0x61,
  LOADARG = 0x70,
  RETURN = 0xF0,
  HALT = 0xFF,
};

struct OpcodeInfo {
  Opcode op;
  std::string_view mnemonic;
  std::uint8_t imm_width;  // bytes of little-endian immediate
  std::uint8_t pops;       // RETURN pops the function's return arity instead
  std::uint8_t pushes;
};

/// Metadata for a defined opcode byte, or nullptr.
const OpcodeInfo* opcode_info(std::uint8_t byte);
const OpcodeInfo& opcode_info(Opcode op);
std::optional<Opcode> opcode_from_mnemonic(std::string_view mnemonic);
const std::vector<OpcodeInfo>& all_opcodes();

inline std::size_t instruction_size(Opcode op) { return 1 + opcode_info(op).imm_width; }
inline bool is_jump(Opcode op) { return op == Opcode::JUMP || op == Opcode::JUMPF; }
inline bool is_terminator(Opcode op) { return op == Opcode::RETURN || op == Opcode::HALT; }

/// One decoded instruction.
struct Instruction {
  std::uint32_t offset = 0;
  Opcode op = Opcode::HALT;
  std::uint64_t imm = 0;

  [[nodiscard]] std::uint32_t next() const {
    return offset + static_cast<std::uint32_t>(instruction_size(op));
  }
};

/// Appends the encoding of (op, imm) to `code`.
void encode_instruction(std::vector<std::uint8_t>& code, Opcode op, std::uint64_t imm = 0);

/// Decodes the instruction at `offset`. Returns nullopt when the opcode byte
/// is undefined or the immediate runs past `end`.
std::optional<Instruction> decode_instruction(std::span<const std::uint8_t> code,
                                              std::uint32_t offset, std::uint32_t end);

using Selector = std::array<std::uint8_t, 4>;

std::string selector_hex(const Selector& sel);
std::optional<Selector> parse_selector(std::string_view hex);

/// Canonical signature string, e.g. `add(int,int)`.
std::string signature_string(std::string_view name, std::span<const Type> params);

/// First four bytes of SHA-256 over signature_string(name, params).
Selector selector(std::string_view name, std::span<const Type> params);

struct FunctionAbi {
  Selector selector{};
  std::string name;
  std::vector<Type> params;
  Type return_type = Type::Void;
  std::uint32_t code_offset = 0;
  std::uint32_t code_length = 0;

  [[nodiscard]] std::uint32_t code_end() const { return code_offset + code_length; }
  [[nodiscard]] std::size_t return_arity() const { return return_type == Type::Void ? 0 : 1; }

  friend bool operator==(const FunctionAbi&, const FunctionAbi&) = default;
};

/// The deployable unit: string constants, function table, instruction stream.
struct Container {
  std::vector<std::string> constants;
  std::vector<FunctionAbi> functions;
  std::vector<std::uint8_t> code;

  [[nodiscard]] const FunctionAbi* find(const Selector& sel) const;
  [[nodiscard]] const FunctionAbi* find(std::string_view name) const;

  friend bool operator==(const Container&, const Container&) = default;
};

inline constexpr std::array<std::uint8_t, 4> kMagic{0x4B, 0x4F, 0x41, 0x01};

/// Raised when bytes do not form a structurally valid container.
class DecodeError : public KoaError {
 public:
  DecodeError(std::size_t offset, const std::string& reason);
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::vector<std::uint8_t> encode(const Container& container);
Container decode(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);  // throws std::invalid_argument

}  // namespace koa

#endif  // KOA_BYTECODE_HPP

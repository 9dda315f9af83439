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

#include "koa/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "koa/assembler.hpp"
#include "koa/chain.hpp"
#include "koa/pipeline.hpp"
#include "koa/server.hpp"

namespace koa {

namespace fs = std::filesystem;

int exit_code_for(Stage stage) {
  switch (stage) {
    case Stage::Usage: return 1;
    case Stage::Lex:
    case Stage::Parse:
    case Stage::Type:
    case Stage::Compile:
    case Stage::Verify:
    case Stage::Analysis: return 2;
    case Stage::Chain:
    case Stage::Vm: return 3;
  }
  return 1;
}

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KoaError(Stage::Usage, fmt::format("cannot read {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::string s = read_text(path);
  return {s.begin(), s.end()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw KoaError(Stage::Usage, fmt::format("cannot write {}", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw KoaError(Stage::Usage, fmt::format("cannot write {}", path.string()));
}

// Flag value, else environment variable, else default.
std::string with_env(const std::string& flag, const char* var, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* v = std::getenv(var); v != nullptr && *v != '\0') return v;
  return fallback;
}

void report(std::ostream& err, const KoaError& e, const std::string& file) {
  if (const auto* se = dynamic_cast<const SourceError*>(&e)) {
    for (const auto& d : se->diagnostics()) {
      err << "error[" << to_string(d.stage) << "]: " << format_diagnostic(d, file) << '\n';
    }
    return;
  }
  err << "error[" << to_string(e.stage()) << "]: " << e.what() << '\n';
}

Container load_container(const fs::path& path) {
  Container c = decode(read_bytes(path));
  verify_bytecode(c);
  return c;
}

HttpService* g_service = nullptr;

extern "C" void stop_service(int) {
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Koa smart-contract toolchain", "koa"};
  app.require_subcommand(1);

  std::string input, output, address, function, ledger_flag;
  std::vector<std::string> args;
  bool want_disasm = false, want_cost = false, want_trace = false;
  std::uint64_t gas_limit = kDefaultGasLimit;
  int port = -1;

  auto* compile = app.add_subcommand("compile", "compile a .koa source into a container");
  compile->add_option("file", input, "source file")->required();
  compile->add_option("-o,--output", output, "container path (default: <file>.kbc)");
  compile->add_flag("--disasm", want_disasm, "print the bytecode listing");
  compile->add_flag("--cost", want_cost, "print the worst-case cost table");

  auto* deploy = app.add_subcommand("deploy", "deploy a container to the ledger");
  deploy->add_option("file", input, "container file")->required();
  deploy->add_option("--ledger", ledger_flag, "ledger path (env KOA_LEDGER)");

  auto* call = app.add_subcommand("call", "call a deployed function");
  call->add_option("address", address, "contract address")->required();
  call->add_option("function", function, "function name")->required();
  call->add_option("args", args, "arguments");
  call->add_option("--gas-limit", gas_limit, "gas limit");
  call->add_option("--ledger", ledger_flag, "ledger path (env KOA_LEDGER)");
  call->add_flag("--trace", want_trace, "print the execution trace to stderr");
  // Negative integers are arguments, not flags.
  call->positionals_at_end(false);

  auto* analyze_cmd = app.add_subcommand("analyze", "print the worst-case cost table");
  analyze_cmd->add_option("file", input, "source file")->required();

  auto* disasm = app.add_subcommand("disasm", "disassemble a container");
  disasm->add_option("file", input, "container file")->required();

  auto* assemble_cmd = app.add_subcommand("assemble", "assemble a listing into a container");
  assemble_cmd->add_option("file", input, "listing file")->required();
  assemble_cmd->add_option("-o,--output", output, "container path")->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--port", port, "listen port (env KOA_PORT)");
  serve->add_option("--ledger", ledger_flag, "ledger path (env KOA_LEDGER)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return 1;
  }

  const fs::path ledger_path = with_env(ledger_flag, "KOA_LEDGER", "koa-ledger.jsonl");

  try {
    if (compile->parsed()) {
      CompileResult r = compile_source(read_text(input));
      fs::path dest = output.empty() ? fs::path(input).replace_extension(".kbc") : fs::path(output);
      write_bytes(dest, r.bytes);
      if (want_disasm) out << disassemble(r.container);
      if (want_cost) out << render_cost_table(analyze(r.container));
      return 0;
    }
    if (deploy->parsed()) {
      Ledger ledger(ledger_path);
      out << address_hex(ledger.deploy(read_bytes(input))) << '\n';
      return 0;
    }
    if (call->parsed()) {
      auto addr = parse_address(address);
      if (!addr) {
        err << "error[usage]: address must be 0x followed by 40 hex digits\n";
        return 1;
      }
      Ledger ledger(ledger_path);
      std::vector<TraceEntry> trace;
      auto flush_trace = [&] {
        for (const auto& t : trace) err << format_trace(t) << '\n';
      };
      try {
        ExecutionResult r =
            ledger.call(*addr, function, args, gas_limit, want_trace ? &trace : nullptr);
        flush_trace();
        if (r.type != Type::Void) out << render_value(r.value) << '\n';
        out << "gas=" << r.gas_used << " steps=" << r.steps << '\n';
        return 0;
      } catch (const VmError& e) {
        // The failed call still consumed gas; report it like a success.
        flush_trace();
        out << "gas=" << e.gas_used() << " steps=" << e.steps() << '\n';
        throw;
      }
    }
    if (analyze_cmd->parsed()) {
      CompileResult r = compile_source(read_text(input));
      out << render_cost_table(analyze(r.container));
      return 0;
    }
    if (disasm->parsed()) {
      out << disassemble(load_container(input));
      return 0;
    }
    if (assemble_cmd->parsed()) {
      Container c = assemble(read_text(input));
      verify_bytecode(c);
      write_bytes(output, encode(c));
      return 0;
    }
    if (serve->parsed()) {
      ServiceConfig config;
      config.ledger = ledger_path;
      config.port = port >= 0 ? port : std::stoi(with_env("", "KOA_PORT", "8080"));
      HttpService service(config);
      int bound = service.bind();
      out << "listening on http://" << config.host << ':' << bound << '\n' << std::flush;
      g_service = &service;
      std::signal(SIGINT, stop_service);
      std::signal(SIGTERM, stop_service);
      service.listen();
      g_service = nullptr;
      return 0;
    }
  } catch (const KoaError& e) {
    report(err, e, input);
    return exit_code_for(e.stage());
  } catch (const std::invalid_argument& e) {
    err << "error[usage]: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace koa

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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "koa/analysis.hpp"
#include "koa/assembler.hpp"
#include "koa/chain.hpp"
#include "koa/json_io.hpp"
#include "koa/pipeline.hpp"
#include "koa/server.hpp"
#include "koa/verifier.hpp"

namespace py = pybind11;

namespace {

py::object to_py(const koa::Json& j) {
  switch (j.type()) {
    case koa::Json::value_t::null: return py::none();
    case koa::Json::value_t::boolean: return py::bool_(j.get<bool>());
    case koa::Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case koa::Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case koa::Json::value_t::number_float: return py::float_(j.get<double>());
    case koa::Json::value_t::string: return py::str(j.get<std::string>());
    case koa::Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return std::move(out);
    }
    case koa::Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return std::move(out);
    }
    default: return py::none();
  }
}

py::object value_to_py(const koa::Value& v) {
  return std::visit(
      [](const auto& x) -> py::object {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return py::none();
        } else if constexpr (std::is_same_v<T, bool>) {
          return py::bool_(x);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return py::int_(x);
        } else {
          return py::str(x);
        }
      },
      v);
}

koa::Value value_from_py(const py::handle& h) {
  // bool first: Python bools are ints.
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  throw py::type_error("arguments must be int, bool or str");
}

std::vector<std::uint8_t> as_bytes(const py::bytes& b) {
  std::string s = b;
  return {s.begin(), s.end()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

py::dict result_to_py(const koa::ExecutionResult& r) {
  py::dict out;
  out["value"] = value_to_py(r.value);
  out["type"] = std::string(koa::to_string(r.type));
  out["gas_used"] = r.gas_used;
  out["steps"] = r.steps;
  return out;
}

py::dict compile(const std::string& source) {
  koa::CompileResult r = koa::compile_source(source);
  py::dict out;
  out["bytecode"] = to_bytes(r.bytes);
  out["abi"] = to_py(koa::abi_to_json(koa::abi_of(r.container)));
  out["disassembly"] = koa::disassemble(r.container);
  out["cost_report"] = to_py(koa::cost_report_to_json(koa::analyze(r.container)));
  return out;
}

py::dict execute(const py::bytes& bytecode, const std::string& function, const py::list& args,
                 std::uint64_t gas_limit) {
  koa::Container c = koa::decode(as_bytes(bytecode));
  koa::verify_bytecode(c);
  const koa::FunctionAbi* f = c.find(function);
  if (f == nullptr) throw py::key_error("unknown function '" + function + "'");
  koa::CallData call{f->selector, {}};
  for (const auto& a : args) call.args.push_back(value_from_py(a));
  return result_to_py(koa::execute(c, call, gas_limit));
}

}  // namespace

PYBIND11_MODULE(_koa, m) {
  m.doc() = "Koa toolchain: compile, analyze, execute, deploy and call.";

  static py::exception<koa::KoaError> koa_error(m, "KoaError");
  static py::exception<koa::VmError> vm_error(m, "VmError", koa_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const koa::VmError& e) {
      // args: (stage, message, kind, gas_used)
      py::tuple args = py::make_tuple(std::string(koa::to_string(e.stage())), e.what(),
                                      std::string(koa::to_string(e.kind())), e.gas_used());
      PyErr_SetObject(vm_error.ptr(), args.ptr());
    } catch (const koa::KoaError& e) {
      py::list diags;
      if (const auto* se = dynamic_cast<const koa::SourceError*>(&e)) {
        for (const auto& d : se->diagnostics()) diags.append(py::make_tuple(d.line, d.col, d.message));
      }
      // args: (stage, message, [(line, col, message), ...])
      py::tuple args = py::make_tuple(std::string(koa::to_string(e.stage())), e.what(), diags);
      PyErr_SetObject(koa_error.ptr(), args.ptr());
    }
  });

  m.def("compile", &compile, py::arg("source"),
        "Compile source; returns bytecode, abi, disassembly and cost_report.");
  m.def(
      "disassemble", [](const py::bytes& b) { return koa::disassemble(koa::decode(as_bytes(b))); },
      py::arg("bytecode"));
  m.def(
      "assemble", [](const std::string& text) { return to_bytes(koa::encode(koa::assemble(text))); },
      py::arg("listing"));
  m.def(
      "analyze",
      [](const py::bytes& b) {
        return to_py(koa::cost_report_to_json(koa::analyze(koa::decode(as_bytes(b)))));
      },
      py::arg("bytecode"));
  m.def("execute", &execute, py::arg("bytecode"), py::arg("function"), py::arg("args") = py::list(),
        py::arg("gas_limit") = koa::kDefaultGasLimit);
  m.def(
      "address_of", [](const py::bytes& b) { return koa::address_hex(koa::address_of(as_bytes(b))); },
      py::arg("bytecode"));

  py::class_<koa::Ledger>(m, "Ledger")
      .def(py::init([](const std::string& path) { return std::make_unique<koa::Ledger>(path); }),
           py::arg("path"))
      .def(
          "deploy",
          [](koa::Ledger& l, const py::bytes& b) { return koa::address_hex(l.deploy(as_bytes(b))); },
          py::arg("bytecode"))
      .def(
          "call",
          [](const koa::Ledger& l, const std::string& address, const std::string& function,
             const std::vector<std::string>& args, std::uint64_t gas_limit) {
            auto a = koa::parse_address(address);
            if (!a) throw py::value_error("address must be 0x followed by 40 hex digits");
            return result_to_py(l.call(*a, function, args, gas_limit));
          },
          py::arg("address"), py::arg("function"), py::arg("args") = std::vector<std::string>{},
          py::arg("gas_limit") = koa::kDefaultGasLimit)
      .def("contracts", [](const koa::Ledger& l) { return to_py(koa::api_contracts(l).body); })
      .def_property_readonly("path", [](const koa::Ledger& l) { return l.path().string(); });
}

# Copyright 2026 The Koa Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import hashlib
import re

import pytest

import koa

ADD = "contract Adder { func add(a int, b int) int { return a + b } }"


def test_compile_add():
    out = koa.compile(ADD)
    assert out["abi"][0]["name"] == "add"
    assert out["abi"][0]["selector"] == "dcad5462"
    assert out["cost_report"]["add"]["worstCaseGas"] == 4
    assert "0006: ADD" in out["disassembly"]


def test_execute_and_roundtrip():
    code = koa.compile(ADD)["bytecode"]
    res = koa.execute(code, "add", [1, 2])
    assert res == {"value": 3, "type": "int", "gas_used": 4, "steps": 4}
    assert koa.assemble(koa.disassemble(code)) == code
    assert koa.analyze(code)["add"]["worstCaseSteps"] == 4


def test_errors_carry_stage():
    with pytest.raises(koa.KoaError) as info:
        koa.compile("contract C { func f() int { return true } }")
    stage, _, diags = info.value.args
    assert stage == "type"
    assert diags[0][0] == 1

    code = koa.compile("contract D { func div(a int, b int) int { return a / b } }")["bytecode"]
    with pytest.raises(koa.VmError) as trap:
        koa.execute(code, "div", [1, 0])
    assert trap.value.args[2] == "DivideByZero"


def test_ledger(tmp_path):
    code = koa.compile(ADD)["bytecode"]
    ledger = koa.Ledger(str(tmp_path / "ledger.jsonl"))
    address = ledger.deploy(code)
    assert re.fullmatch(r"0x[0-9a-f]{40}", address)
    assert address[2:] == hashlib.sha256(code).hexdigest()[:40]
    assert ledger.deploy(code) == address
    assert ledger.call(address, "add", ["1", "2"])["value"] == 3
    assert [c["address"] for c in ledger.contracts()] == [address]
    with pytest.raises(koa.KoaError):
        ledger.call("0x" + "0" * 40, "add", ["1", "2"])

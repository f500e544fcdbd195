import pytest

from clusterz.cli import full_circuit
from clusterz.core import GateInstance, QuantumCircuit
from clusterz.discriminator import build_discrimination_circuit
from clusterz.qasm import HEADER, QasmError, emit_qasm, parse_qasm
from clusterz.zstates import cluster_circuit, z_pattern, zstate_circuit


def body(text):
    return [line for line in text.splitlines() if line and not line.startswith(("//", "OPENQASM", "include", "qreg", "creg"))]


def test_single_hadamard():
    text = emit_qasm(QuantumCircuit(1).h(1))
    assert text.startswith(HEADER)
    assert body(text) == ["h q[0];"]
    assert "qreg q[1];" in text and "creg" not in text


def test_discrimination_round_trip():
    circ = build_discrimination_circuit(2).circuit
    assert parse_qasm(emit_qasm(circ)) == circ


def test_zstate_statement_count():
    text = emit_qasm(zstate_circuit(3, 3))
    lines = body(text)
    assert len([s for s in lines if s.startswith("z ")]) == len(z_pattern(3, 3).qubits_with_z) == 2
    assert lines[: len(cluster_circuit(3))] == body(emit_qasm(cluster_circuit(3)))
    assert lines[-2:] == ["z q[0];", "z q[2];"]


@pytest.mark.parametrize("n", range(2, 7))
def test_generator_round_trips(n):
    for k in sorted({0, 1, 2**n - 1, (2**n) // 3}):
        for circ in (zstate_circuit(n, k), full_circuit(n, k), build_discrimination_circuit(n).circuit):
            text = emit_qasm(circ)
            back = parse_qasm(text)
            assert back == circ
            assert emit_qasm(back) == text


def test_all_kinds_round_trip():
    circ = QuantumCircuit(3, 2).h(1).x(2).z(3).s(1).sdg(2).cx(3, 1).cz(1, 2).barrier().barrier(1, 3)
    circ.measure(2, 1).measure(3, 2)
    assert parse_qasm(emit_qasm(circ)) == circ


def test_measure_syntax():
    text = emit_qasm(build_discrimination_circuit(2).circuit)
    # ancilla a_1 (qubit 3) lands in classical bit 2, a_2 (qubit 4) in bit 1
    assert "measure q[2] -> c[1];" in text and "measure q[3] -> c[0];" in text


def test_parse_broadcast_and_multiple_registers():
    text = """OPENQASM 2.0;
include "qelib1.inc";
qreg a[2];
qreg b[1];
creg m[3];
h a;
cx a[1],b[0];
barrier a,b;
measure a -> m[0];
"""
    with pytest.raises(QasmError):
        parse_qasm(text)  # size-mismatched measure
    text = text.replace("measure a -> m[0];", "measure b[0] -> m[2];")
    circ = parse_qasm(text)
    assert circ.n_qubits == 3 and circ.n_clbits == 3
    assert [(g.kind, g.targets) for g in circ.gates[:3]] == [("H", (1,)), ("H", (2,)), ("CNOT", (2, 3))]
    assert circ.gates[3] == GateInstance("Barrier", (1, 2, 3))
    assert circ.gates[4] == GateInstance("Measure", (3,), 3)


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("OPENQASM 2.0;\nqreg q[1];\nh r[0];\n", 3, 3),
        ("OPENQASM 2.0;\nqreg q[1];\nrx(0.1) q[0];\n", 3, 1),
        ("OPENQASM 2.0;\nqreg q[1];\nh q[1];\n", 3, 5),
        ("OPENQASM 2.0;\nqreg q[2];\ncx q[0];\n", 3, 1),
        ("OPENQASM 2.0;\nqreg q[1];\nh q[0]\n", 3, 7),
        ("OPENQASM 3.0;\n", 1, 10),
        ("OPENQASM 2.0;\nqreg q[1];\nh q[0]; $\n", 3, 9),
    ],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(QasmError) as info:
        parse_qasm(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_unsupported_include():
    with pytest.raises(QasmError, match="include"):
        parse_qasm('OPENQASM 2.0;\ninclude "other.inc";\n')


def test_emit_is_deterministic():
    assert emit_qasm(full_circuit(4, 9)) == emit_qasm(full_circuit(4, 9))

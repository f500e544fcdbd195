"""OpenQASM 2.0 text for the supported gate subset.

Circuits number qubits from 1; QASM indexes from 0, so qubit k is written
``q[k-1]``. The emitted form is canonical: one statement per line, one
quantum register ``q`` and one classical register ``c``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from clusterz.core import GateInstance, QuantumCircuit

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
INDEX_NOTE = "// qubit k -> q[k-1], classical bit k -> c[k-1]\n"

_TO_QASM = {"H": "h", "X": "x", "Z": "z", "S": "s", "Sdg": "sdg", "CNOT": "cx", "CZ": "cz"}
_FROM_QASM = {v: k for k, v in _TO_QASM.items()}
_ARITY = {"h": 1, "x": 1, "z": 1, "s": 1, "sdg": 1, "cx": 2, "cz": 2}


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def emit_qasm(circuit: QuantumCircuit) -> str:
    lines = [HEADER, INDEX_NOTE, f"qreg q[{circuit.n_qubits}];\n"]
    if circuit.n_clbits:
        lines.append(f"creg c[{circuit.n_clbits}];\n")
    for g in circuit.gates:
        qs = ",".join(f"q[{t - 1}]" for t in g.targets)
        if g.kind in _TO_QASM:
            lines.append(f"{_TO_QASM[g.kind]} {qs};\n")
        elif g.kind == "Measure":
            lines.append(f"measure {qs} -> c[{g.classical_target - 1}];\n")
        elif g.kind == "Barrier":
            lines.append(f"barrier {qs};\n")
        else:
            raise QasmError(f"gate {g.kind} has no QASM form")
    return "".join(lines)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>\d+\.\d*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<sym>[\[\];,])
  | (?P<other>\S)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Tok]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            yield _Tok(kind, m.group(), line, pos - line_start + 1)
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokenize(text))
        self.i = 0
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, tuple[int, int]] = {}
        self.n_q = self.n_c = 0
        self.ops: list[tuple] = []

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, kind: str | None = None, text: str | None = None) -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 0)
            raise QasmError(f"unexpected end of input, expected {text or kind}", last.line, last.col + len(last.text))
        if (kind and tok.kind != kind) or (text and tok.text != text):
            raise QasmError(f"expected {text or kind}, found {tok.text!r}", tok.line, tok.col)
        self.i += 1
        return tok

    def parse(self) -> QuantumCircuit:
        self.next("id", "OPENQASM")
        ver = self.next("real")
        if ver.text not in ("2.0", "2"):
            raise QasmError(f"unsupported version {ver.text}", ver.line, ver.col)
        self.next("sym", ";")
        while self.peek() is not None:
            self.statement()
        circ = QuantumCircuit(max(self.n_q, 1), self.n_c)
        for kind, targets, clbit in self.ops:
            circ.append(GateInstance(kind, targets, clbit))
        return circ

    def statement(self) -> None:
        tok = self.next("id")
        word = tok.text
        if word == "include":
            name = self.next("string")
            if name.text != '"qelib1.inc"':
                raise QasmError(f"unsupported include {name.text}", name.line, name.col)
            self.next("sym", ";")
        elif word in ("qreg", "creg"):
            self.declare(word)
        elif word in _ARITY:
            self.gate(tok)
        elif word == "measure":
            src = self.argument(self.qregs, tok)
            self.next("arrow")
            dst = self.argument(self.cregs, tok)
            self.next("sym", ";")
            if len(src) != len(dst):
                raise QasmError("measure register sizes differ", tok.line, tok.col)
            for q, c in zip(src, dst):
                self.ops.append(("Measure", (q,), c))
        elif word == "barrier":
            targets = self.arguments(tok)
            self.ops.append(("Barrier", tuple(q for arg in targets for q in arg), None))
        else:
            raise QasmError(f"unsupported statement {word!r}", tok.line, tok.col)

    def declare(self, word: str) -> None:
        name = self.next("id")
        self.next("sym", "[")
        size = int(self.next("int").text)
        self.next("sym", "]")
        self.next("sym", ";")
        table = self.qregs if word == "qreg" else self.cregs
        if name.text in self.qregs or name.text in self.cregs:
            raise QasmError(f"register {name.text!r} redeclared", name.line, name.col)
        if word == "qreg":
            table[name.text] = (self.n_q, size)
            self.n_q += size
        else:
            table[name.text] = (self.n_c, size)
            self.n_c += size

    def argument(self, table: dict, stmt: _Tok) -> list[int]:
        """1-based indices named by ``reg`` or ``reg[i]``."""
        name = self.next("id")
        if name.text not in table:
            raise QasmError(f"unknown register {name.text!r}", name.line, name.col)
        offset, size = table[name.text]
        tok = self.peek()
        if tok is not None and tok.text == "[":
            self.next()
            idx = self.next("int")
            self.next("sym", "]")
            i = int(idx.text)
            if i >= size:
                raise QasmError(f"index {i} out of range for {name.text}[{size}]", idx.line, idx.col)
            return [offset + i + 1]
        return [offset + j + 1 for j in range(size)]

    def arguments(self, stmt: _Tok) -> list[list[int]]:
        args = [self.argument(self.qregs, stmt)]
        while self.peek() is not None and self.peek().text == ",":
            self.next()
            args.append(self.argument(self.qregs, stmt))
        self.next("sym", ";")
        return args

    def gate(self, tok: _Tok) -> None:
        args = self.arguments(tok)
        kind = _FROM_QASM[tok.text]
        if len(args) != _ARITY[tok.text]:
            raise QasmError(f"{tok.text} takes {_ARITY[tok.text]} argument(s)", tok.line, tok.col)
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            raise QasmError("register sizes differ", tok.line, tok.col)
        width = sizes.pop() if sizes else 1
        for j in range(width):
            targets = tuple(a[j] if len(a) > 1 else a[0] for a in args)
            if len(set(targets)) != len(targets):
                raise QasmError(f"{tok.text} needs distinct qubits", tok.line, tok.col)
            self.ops.append((kind, targets, None))


def parse_qasm(text: str) -> QuantumCircuit:
    return _Parser(text).parse()

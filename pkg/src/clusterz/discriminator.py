"""Non-destructive Z-state discrimination with one ancilla per data qubit.

Data qubits are 1..N and ancilla ``a_i`` is qubit ``N + i``. Each ancilla
reads one stabilizer of the chain:

    K_1 = X_1 Z_2,   K_i = Z_{i-1} X_i Z_{i+1},   K_N = Z_{N-1} X_N

A Z-flip on data qubit j anticommutes only with K_j, so the ancilla
syndrome is exactly the set of flipped qubits.

Ancilla ``a_i`` is measured into classical bit ``N + 1 - i``. Readout
strings therefore list ``a_N`` first and ``a_1`` last, which is the order in
which the two-qubit ancilla table is printed (|Z_2^1>, a flip on qubit 1,
reads ``"01"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from clusterz.core import (
    CERTAIN,
    QuantumCircuit,
    Statevector,
    marginal_probabilities,
    measure_and_collapse,
    run_circuit,
)
from clusterz.pauli import PauliString
from clusterz.zstates import pattern_index, z_pattern

# Two-qubit readout -> index, as printed
TWO_QUBIT_TABLE = {"00": 0, "01": 1, "10": 2, "11": 3}

# Three-qubit readout -> index, frozen from exhaustive simulation of all
# eight inputs (tests/test_discriminator.py recomputes it)
THREE_QUBIT_TABLE = {
    "000": 0,
    "100": 1,
    "001": 2,
    "101": 3,
    "010": 4,
    "110": 5,
    "011": 6,
    "111": 7,
}


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"discrimination needs at least 2 data qubits, got {n}")


def stabilizer_generators(n: int) -> list[PauliString]:
    _check_n(n)
    gens = []
    for a in range(1, n + 1):
        ops = {a: "X"}
        if a > 1:
            ops[a - 1] = "Z"
        if a < n:
            ops[a + 1] = "Z"
        gens.append(PauliString.from_sparse(n, ops))
    return gens


def ancilla_qubit(n: int, i: int) -> int:
    return n + i


def ancilla_clbit(n: int, i: int) -> int:
    return n + 1 - i


@dataclass
class DiscriminationCircuit:
    n_data: int
    circuit: QuantumCircuit
    # ancilla qubit -> stabilizer it reads
    ancilla_map: dict[int, PauliString]

    @property
    def ancilla_qubits(self) -> list[int]:
        return [ancilla_qubit(self.n_data, i) for i in range(1, self.n_data + 1)]

    @property
    def readout_order(self) -> list[int]:
        """Ancilla qubits sorted by classical bit, i.e. readout string order."""
        return list(reversed(self.ancilla_qubits))

    def unitary_part(self) -> QuantumCircuit:
        return QuantumCircuit(self.circuit.n_qubits, 0, self.circuit.unitary_gates())


def _gadget(circ: QuantumCircuit, n: int, i: int) -> None:
    a = ancilla_qubit(n, i)
    # Z-parity of the neighbours, then X of the sandwiched qubit by kickback
    if i > 1:
        circ.cx(i - 1, a)
    if i < n:
        circ.cx(i + 1, a)
    circ.h(a)
    circ.cx(a, i)
    circ.h(a)
    circ.measure(a, ancilla_clbit(n, i))


def build_discrimination_circuit(n: int) -> DiscriminationCircuit:
    """Ancilla gadgets on N data + N ancilla qubits, ancilla by ancilla."""
    _check_n(n)
    circ = QuantumCircuit(2 * n, n)
    for i in range(1, n + 1):
        _gadget(circ, n, i)
    gens = stabilizer_generators(n)
    return DiscriminationCircuit(n, circ, {ancilla_qubit(n, i): gens[i - 1] for i in range(1, n + 1)})


def decode_ancilla(bits: str, n: int) -> int:
    """Map a readout string (classical-bit order) to the Z-state index."""
    _check_n(n)
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise ValueError(f"expected {n} ancilla bits, got {bits!r}")
    if n == 2:
        return TWO_QUBIT_TABLE[bits]
    if n == 3:
        return THREE_QUBIT_TABLE[bits]
    # flag of K_j sits at string position n - j
    flags = bits[::-1]
    return int(flags, 2)


def syndrome_string(n: int, k: int) -> str:
    """Readout predicted from the stabilizer algebra (independent of simulation)."""
    flipped = z_pattern(n, k).qubits_with_z
    return "".join("1" if ancilla_clbit(n, c) in flipped else "0" for c in range(1, n + 1))


def ancilla_distribution(state: Statevector) -> dict[str, float]:
    """Exact readout distribution for ``state`` on the data qubits."""
    n = state.n_qubits
    dc = build_discrimination_circuit(n)
    full = run_circuit(state.tensor(Statevector.zero(n)), dc.unitary_part())
    p = marginal_probabilities(full.probabilities(), 2 * n, dc.readout_order)
    return {format(i, f"0{n}b"): float(v) for i, v in enumerate(p) if v > 1e-15}


class DiscriminationOutcome(NamedTuple):
    k: int
    bits: str
    post_state: Statevector


def run_discrimination(state: Statevector, seed=None) -> DiscriminationOutcome:
    n = state.n_qubits
    dc = build_discrimination_circuit(n)
    full = run_circuit(state.tensor(Statevector.zero(n)), dc.unitary_part())
    bits, collapsed = measure_and_collapse(full, dc.readout_order, seed)

    # ancillas are now a definite basis state; slice the data register out
    anc_value = 0
    for q, b in zip(dc.readout_order, bits):
        i = q - n
        anc_value |= int(b) << (n - i)
    data = collapsed.amplitudes.reshape(2**n, 2**n)[:, anc_value]
    data = data / np.linalg.norm(data)
    return DiscriminationOutcome(decode_ancilla(bits, n), bits, Statevector(n, data))


def discriminate(state: Statevector, seed=None) -> tuple[int, Statevector]:
    """Identify the Z-state index from the ancillas and return the undisturbed data state."""
    out = run_discrimination(state, seed)
    return out.k, out.post_state


def is_deterministic(dist: dict[str, float]) -> bool:
    return max(dist.values()) >= CERTAIN


def consistent_index(n: int, bits: str) -> bool:
    """True when decoding agrees with the Z pattern implied by the stabilizer flags."""
    flipped = {n + 1 - c for c, b in enumerate(bits, start=1) if b == "1"}
    return decode_ancilla(bits, n) == pattern_index(n, flipped)

"""Dense statevector and density-matrix simulation.

Qubits are numbered from 1. Qubit 1 is the most significant bit of the
basis index, so ``amplitudes[i]`` is the amplitude of the bitstring
``format(i, f"0{n}b")`` read left to right as qubits 1..n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from clusterz.pauli import PauliString

STATE_ATOL = 1e-12
MATRIX_ATOL = 1e-10
CERTAIN = 1 - 1e-10

SQRT_HALF = 1 / np.sqrt(2)

GATE_MATRICES: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * SQRT_HALF,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}

ONE_QUBIT_KINDS = frozenset(GATE_MATRICES)
TWO_QUBIT_KINDS = frozenset({"CNOT", "CZ"})
UNITARY_KINDS = ONE_QUBIT_KINDS | TWO_QUBIT_KINDS
GATE_KINDS = UNITARY_KINDS | {"Measure", "Barrier"}


class SimulationError(ValueError):
    """Raised for invalid gates, circuits or states."""


@dataclass(frozen=True)
class GateInstance:
    kind: str
    targets: tuple[int, ...]
    classical_target: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.kind not in GATE_KINDS:
            raise SimulationError(f"unknown gate kind {self.kind!r}")
        n = len(self.targets)
        if self.kind in TWO_QUBIT_KINDS:
            if n != 2 or self.targets[0] == self.targets[1]:
                raise SimulationError(f"{self.kind} needs two distinct targets, got {self.targets}")
        elif self.kind == "Barrier":
            if n == 0 or len(set(self.targets)) != n:
                raise SimulationError("barrier needs one or more distinct targets")
        elif n != 1:
            raise SimulationError(f"{self.kind} acts on exactly one qubit, got {self.targets}")
        if self.kind == "Measure":
            if self.classical_target is None:
                raise SimulationError("measure needs a classical target")
        elif self.classical_target is not None:
            raise SimulationError(f"{self.kind} takes no classical target")

    @property
    def is_unitary(self) -> bool:
        return self.kind in UNITARY_KINDS


@dataclass
class QuantumCircuit:
    """Ordered gate list on ``n_qubits`` quantum and ``n_clbits`` classical bits.

    The builder methods return ``self`` so calls can be chained.
    """

    n_qubits: int
    n_clbits: int = 0
    gates: list[GateInstance] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_clbits < 0:
            raise SimulationError("circuit needs at least one qubit")
        gates, self.gates = list(self.gates), []
        for gate in gates:
            self.append(gate)

    def append(self, gate: GateInstance) -> "QuantumCircuit":
        for t in gate.targets:
            if not 1 <= t <= self.n_qubits:
                raise SimulationError(f"qubit {t} out of range 1..{self.n_qubits}")
        if gate.classical_target is not None and not 1 <= gate.classical_target <= self.n_clbits:
            raise SimulationError(
                f"classical bit {gate.classical_target} out of range 1..{self.n_clbits}"
            )
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[GateInstance]) -> "QuantumCircuit":
        for gate in gates:
            self.append(gate)
        return self

    def h(self, q): return self.append(GateInstance("H", (q,)))
    def x(self, q): return self.append(GateInstance("X", (q,)))
    def z(self, q): return self.append(GateInstance("Z", (q,)))
    def s(self, q): return self.append(GateInstance("S", (q,)))
    def sdg(self, q): return self.append(GateInstance("Sdg", (q,)))
    def cx(self, control, target): return self.append(GateInstance("CNOT", (control, target)))
    def cz(self, a, b): return self.append(GateInstance("CZ", (a, b)))

    def measure(self, q, c):
        return self.append(GateInstance("Measure", (q,), c))

    def barrier(self, *qubits):
        return self.append(GateInstance("Barrier", qubits or tuple(range(1, self.n_qubits + 1))))

    def unitary_gates(self) -> list[GateInstance]:
        return [g for g in self.gates if g.is_unitary]

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise SimulationError(
                f"{self.n_qubits} qubits need {2**self.n_qubits} amplitudes, got {amps.size}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > 1e-9:
            raise SimulationError(f"state is not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1
        return cls(n_qubits, amps)

    @classmethod
    def from_bits(cls, bits: str) -> "Statevector":
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1
        return cls(len(bits), amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex], normalize: bool = False) -> "Statevector":
        amps = np.asarray(amplitudes, dtype=complex)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        n = int(round(np.log2(amps.size)))
        return cls(n, amps)

    def tensor(self, other: "Statevector") -> "Statevector":
        """``self`` on the leading qubits, ``other`` on the trailing ones."""
        return Statevector(self.n_qubits + other.n_qubits, np.kron(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: "Statevector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def overlap(self, other: "Statevector") -> float:
        """|<self|other>|^2."""
        return abs(self.inner(other)) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator in the same basis order as :class:`Statevector`.

    ``raw`` marks tomographic estimates that may be non-positive.
    """

    n_qubits: int
    entries: np.ndarray
    raw: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        dim = 2**self.n_qubits
        if m.shape != (dim, dim):
            raise SimulationError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, atol: float = MATRIX_ATOL) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=atol, rtol=0))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_physical(self, atol: float = MATRIX_ATOL) -> bool:
        return (
            self.is_hermitian(atol)
            and abs(self.trace - 1) <= atol
            and bool(self.eigenvalues().min() >= -atol)
        )

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.entries).real, 0, None)

    def partial_trace(self, keep: Sequence[int]) -> "DensityMatrix":
        """Reduced state on the qubits ``keep`` (1-based, in the given order)."""
        n = self.n_qubits
        keep = [q - 1 for q in keep]
        drop = [q for q in range(n) if q not in keep]
        t = self.entries.reshape((2,) * (2 * n))
        # bring kept row axes then dropped row axes, same for columns
        t = t.transpose(keep + drop + [n + q for q in keep] + [n + q for q in drop])
        dk, dd = 2 ** len(keep), 2 ** len(drop)
        t = t.reshape(dk, dd, dk, dd)
        return DensityMatrix(len(keep), np.einsum("ajbj->ab", t), raw=self.raw)


# -- kernels -----------------------------------------------------------------


def _apply_matrix(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(matrix, tensor, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _apply_cnot(tensor: np.ndarray, control: int, target: int) -> np.ndarray:
    out = tensor.copy()
    idx = [slice(None)] * tensor.ndim
    idx[control] = 1
    sub = tuple(idx)
    t_axis = target if target < control else target - 1
    out[sub] = np.flip(tensor[sub], axis=t_axis)
    return out


def _apply_cz(tensor: np.ndarray, a: int, b: int) -> np.ndarray:
    out = tensor.copy()
    idx = [slice(None)] * tensor.ndim
    idx[a] = 1
    idx[b] = 1
    out[tuple(idx)] *= -1
    return out


def _apply_to_tensor(tensor: np.ndarray, gate: GateInstance, offset: int = 0, conj: bool = False) -> np.ndarray:
    axes = [t - 1 + offset for t in gate.targets]
    if gate.kind in GATE_MATRICES:
        m = GATE_MATRICES[gate.kind]
        return _apply_matrix(tensor, m.conj() if conj else m, axes[0])
    if gate.kind == "CNOT":
        return _apply_cnot(tensor, axes[0], axes[1])
    if gate.kind == "CZ":
        return _apply_cz(tensor, axes[0], axes[1])
    raise SimulationError(f"{gate.kind} is not a unitary gate")


def _check_gate(gate: GateInstance, n_qubits: int) -> None:
    if not gate.is_unitary:
        raise SimulationError(f"{gate.kind} cannot be applied as a unitary")
    for t in gate.targets:
        if not 1 <= t <= n_qubits:
            raise SimulationError(f"qubit {t} out of range 1..{n_qubits}")


def apply_gate(state: Statevector, gate: GateInstance) -> Statevector:
    _check_gate(gate, state.n_qubits)
    n = state.n_qubits
    t = _apply_to_tensor(state.amplitudes.reshape((2,) * n), gate)
    return Statevector(n, t.reshape(-1))


def run_circuit(state: Statevector, circuit: QuantumCircuit) -> Statevector:
    """Apply every gate of ``circuit`` in order. Barriers are skipped."""
    if circuit.n_qubits != state.n_qubits:
        raise SimulationError(
            f"circuit has {circuit.n_qubits} qubits but state has {state.n_qubits}"
        )
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n)
    for gate in circuit.gates:
        if gate.kind == "Barrier":
            continue
        _check_gate(gate, n)
        t = _apply_to_tensor(t, gate)
    return Statevector(n, t.reshape(-1))


def density_from_state(state: Statevector) -> DensityMatrix:
    a = state.amplitudes
    return DensityMatrix(state.n_qubits, np.outer(a, a.conj()))


def apply_gate_density(rho: DensityMatrix, gate: GateInstance) -> DensityMatrix:
    _check_gate(gate, rho.n_qubits)
    n = rho.n_qubits
    t = rho.entries.reshape((2,) * (2 * n))
    t = _apply_to_tensor(t, gate)
    t = _apply_to_tensor(t, gate, offset=n, conj=True)
    return DensityMatrix(n, t.reshape(2**n, 2**n), raw=rho.raw)


def evolve_density(rho: DensityMatrix, circuit: QuantumCircuit) -> DensityMatrix:
    """Conjugate ``rho`` by the circuit unitary. Barriers are skipped."""
    if circuit.n_qubits != rho.n_qubits:
        raise SimulationError(
            f"circuit has {circuit.n_qubits} qubits but matrix has {rho.n_qubits}"
        )
    for gate in circuit.gates:
        if gate.kind != "Barrier":
            rho = apply_gate_density(rho, gate)
    return rho


def circuit_unitary(circuit: QuantumCircuit) -> np.ndarray:
    """Dense unitary of the circuit, column ``j`` being the image of basis state ``j``."""
    n = circuit.n_qubits
    dim = 2**n
    cols = np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n)
    for gate in circuit.gates:
        if gate.kind == "Barrier":
            continue
        _check_gate(gate, n)
        cols = _apply_to_tensor(cols, gate, offset=1)
    return cols.reshape(dim, dim).T


# -- measurement ---------------------------------------------------------------


def _check_qubits(qubits: Sequence[int], n_qubits: int) -> list[int]:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise SimulationError(f"measured qubits must be distinct, got {qubits}")
    for q in qubits:
        if not 1 <= q <= n_qubits:
            raise SimulationError(f"qubit {q} out of range 1..{n_qubits}")
    return qubits


def marginal_probabilities(probs: np.ndarray, n_qubits: int, qubits: Sequence[int]) -> np.ndarray:
    """Distribution of the listed qubits; outcome index has ``qubits[0]`` as MSB."""
    qubits = _check_qubits(qubits, n_qubits)
    t = np.asarray(probs, dtype=float).reshape((2,) * n_qubits)
    others = tuple(q for q in range(n_qubits) if q + 1 not in qubits)
    t = t.sum(axis=others)
    remaining = [q for q in range(1, n_qubits + 1) if q in qubits]
    t = t.transpose([remaining.index(q) for q in qubits])
    return t.reshape(-1)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def measure_and_collapse(state: Statevector, qubits: Sequence[int], seed=None) -> tuple[str, Statevector]:
    """Projectively measure ``qubits`` and return the bits with the collapsed state.

    Bits are listed in the order of ``qubits``.
    """
    n = state.n_qubits
    qubits = _check_qubits(qubits, n)
    m = len(qubits)
    p = marginal_probabilities(state.probabilities(), n, qubits)
    best = int(np.argmax(p))
    if p[best] >= CERTAIN:
        outcome = best
    else:
        outcome = int(_rng(seed).choice(p.size, p=p / p.sum()))
    bits = format(outcome, f"0{m}b")

    t = np.array(state.amplitudes).reshape((2,) * n)
    for q, b in zip(qubits, bits):
        idx = [slice(None)] * n
        idx[q - 1] = 1 - int(b)
        t[tuple(idx)] = 0
    amps = t.reshape(-1)
    norm = np.linalg.norm(amps)
    if norm < 1e-14:
        raise SimulationError("projection onto a zero-probability outcome")
    return bits, Statevector(n, amps / norm)


@dataclass
class CountsTable:
    """Measurement histogram. The leftmost character of every key is the lowest classical bit."""

    n_measured: int
    shots: int
    counts: dict[str, int]
    bit_order: str = "c1-leftmost"

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise SimulationError("counts do not sum to shots")
        for key in self.counts:
            if len(key) != self.n_measured or set(key) - {"0", "1"}:
                raise SimulationError(f"malformed bitstring {key!r}")

    def most_common(self) -> str:
        # ties broken by bitstring so the result is deterministic
        return max(sorted(self.counts), key=lambda k: self.counts[k])

    def frequencies(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}

    def to_dict(self) -> dict:
        return {
            "n_measured": self.n_measured,
            "shots": self.shots,
            "bit_order": self.bit_order,
            "counts": dict(sorted(self.counts.items())),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CountsTable":
        return cls(data["n_measured"], data["shots"], dict(data["counts"]), data.get("bit_order", "c1-leftmost"))


def sample_indices(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` i.i.d. outcome indices from ``probs``."""
    p = np.clip(np.asarray(probs, dtype=float), 0, None)
    p = p / p.sum()
    return rng.choice(p.size, size=shots, p=p)


def counts_from_indices(indices: np.ndarray, n_bits: int) -> dict[str, int]:
    values, freq = np.unique(indices, return_counts=True)
    return {format(int(v), f"0{n_bits}b"): int(c) for v, c in zip(values, freq)}


def sample_distribution(probs: np.ndarray, n_bits: int, shots: int, seed=None) -> CountsTable:
    if shots < 1:
        raise SimulationError("shots must be at least 1")
    idx = sample_indices(probs, shots, _rng(seed))
    return CountsTable(n_bits, shots, counts_from_indices(idx, n_bits))


def sample_counts(state: Statevector, qubits: Sequence[int], shots: int, seed=None) -> CountsTable:
    """Born-rule samples of ``qubits`` without collapse between shots."""
    if shots < 1:
        raise SimulationError("shots must be at least 1")
    p = marginal_probabilities(state.probabilities(), state.n_qubits, qubits)
    return sample_distribution(p, len(qubits), shots, seed)


def pauli_expectation(state: Statevector, pauli: PauliString | str) -> float:
    """<psi|P|psi> for a Pauli string whose first letter acts on qubit 1."""
    pauli = PauliString.parse(pauli) if isinstance(pauli, str) else pauli
    if pauli.n_qubits != state.n_qubits:
        raise SimulationError(
            f"Pauli string has {pauli.n_qubits} letters for a {state.n_qubits}-qubit state"
        )
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n)
    for axis, letter in enumerate(pauli.letters):
        if letter != "I":
            t = _apply_matrix(t, PAULI_MATRICES[letter], axis)
    value = np.vdot(state.amplitudes, t.reshape(-1))
    return float(value.real)


PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": GATE_MATRICES["X"],
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": GATE_MATRICES["Z"],
}


def pauli_matrix(pauli: PauliString | str) -> np.ndarray:
    pauli = PauliString.parse(pauli) if isinstance(pauli, str) else pauli
    m = np.ones((1, 1), dtype=complex)
    for letter in pauli.letters:
        m = np.kron(m, PAULI_MATRICES[letter])
    return m

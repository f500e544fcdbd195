"""Depolarizing gate noise and readout flips on dense density matrices."""

from __future__ import annotations

import itertools
import re
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from clusterz.core import (
    PAULI_MATRICES,
    CountsTable,
    DensityMatrix,
    QuantumCircuit,
    SimulationError,
    Statevector,
    _apply_matrix,
    _rng,
    apply_gate_density,
    counts_from_indices,
    density_from_state,
    marginal_probabilities,
    run_circuit,
    sample_counts,
    sample_indices,
)

MAX_DENSITY_QUBITS = 12


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    p_readout: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "p_readout"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def is_zero(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.p_readout == 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        return cls(float(data.get("p1", 0)), float(data.get("p2", 0)), float(data.get("p_readout", 0)))

    @classmethod
    def parse(cls, spec: str | None) -> "NoiseModel":
        """Parse ``"depol:<p1>,<p2>;readout:<p>"``; either part may be omitted."""
        if spec is None or not spec.strip():
            return cls()
        p1 = p2 = pr = 0.0
        for part in filter(None, (s.strip() for s in spec.split(";"))):
            m = re.fullmatch(r"depol:\s*([^,\s]+)\s*,\s*([^,\s]+)", part)
            if m:
                p1, p2 = float(m.group(1)), float(m.group(2))
                continue
            m = re.fullmatch(r"readout:\s*(\S+)", part)
            if m:
                pr = float(m.group(1))
                continue
            raise ValueError(f"cannot parse noise spec fragment {part!r}")
        return cls(p1, p2, pr)

    def __str__(self):
        return f"depol:{self.p1},{self.p2};readout:{self.p_readout}"


def apply_depolarizing(rho: DensityMatrix, qubits: Sequence[int], p: float) -> DensityMatrix:
    """Uniform Pauli channel on ``qubits``: (1-p) rho + p/(4^m-1) sum_{P != I} P rho P."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p}")
    if p == 0:
        return rho
    n = rho.n_qubits
    qubits = list(qubits)
    for q in qubits:
        if not 1 <= q <= n:
            raise SimulationError(f"qubit {q} out of range 1..{n}")
    m = len(qubits)
    t = rho.entries.reshape((2,) * (2 * n))
    acc = np.zeros_like(t)
    for letters in itertools.product("IXYZ", repeat=m):
        if set(letters) == {"I"}:
            continue
        term = t
        for q, letter in zip(qubits, letters):
            if letter != "I":
                mat = PAULI_MATRICES[letter]
                term = _apply_matrix(term, mat, q - 1)
                term = _apply_matrix(term, mat.conj(), n + q - 1)
        acc = acc + term
    out = (1 - p) * t + (p / (4**m - 1)) * acc
    return DensityMatrix(n, out.reshape(2**n, 2**n), raw=rho.raw)


def evolve_noisy(rho: DensityMatrix, circuit: QuantumCircuit, noise: NoiseModel) -> DensityMatrix:
    """Gate-by-gate evolution, depolarizing the gate's targets after each gate."""
    if circuit.n_qubits != rho.n_qubits:
        raise SimulationError("circuit and density matrix sizes differ")
    if rho.n_qubits > MAX_DENSITY_QUBITS:
        raise SimulationError(f"density simulation is limited to {MAX_DENSITY_QUBITS} qubits")
    for gate in circuit.gates:
        if gate.kind == "Barrier":
            continue
        rho = apply_gate_density(rho, gate)
        p = noise.p1 if len(gate.targets) == 1 else noise.p2
        rho = apply_depolarizing(rho, gate.targets, p)
    return rho


def split_measurements(circuit: QuantumCircuit) -> tuple[QuantumCircuit, list[int]]:
    """Separate terminal measurements; returns the unitary part and measured qubits by classical bit."""
    by_clbit: dict[int, int] = {}
    measured: set[int] = set()
    for gate in circuit.gates:
        if gate.kind == "Measure":
            by_clbit[gate.classical_target] = gate.targets[0]
            measured.add(gate.targets[0])
        elif gate.is_unitary and measured & set(gate.targets):
            raise SimulationError("only terminal measurements are supported")
    unitary = QuantumCircuit(circuit.n_qubits, 0, circuit.unitary_gates())
    return unitary, [by_clbit[c] for c in sorted(by_clbit)]


def flip_readout(indices: np.ndarray, n_bits: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if p == 0:
        return indices
    flips = rng.random((indices.size, n_bits)) < p
    weights = 1 << np.arange(n_bits - 1, -1, -1)
    return indices ^ (flips.astype(np.int64) @ weights)


def sample_density(rho: DensityMatrix, qubits: Sequence[int], shots: int, seed=None, p_readout: float = 0.0) -> CountsTable:
    if shots < 1:
        raise SimulationError("shots must be at least 1")
    rng = _rng(seed)
    p = marginal_probabilities(rho.probabilities(), rho.n_qubits, qubits)
    idx = sample_indices(p, shots, rng)
    idx = flip_readout(idx, len(qubits), p_readout, rng)
    return CountsTable(len(qubits), shots, counts_from_indices(idx, len(qubits)))


def noisy_counts(
    circuit: QuantumCircuit,
    noise: NoiseModel,
    qubits: Sequence[int] | None = None,
    shots: int = 8192,
    seed=None,
    initial: Statevector | None = None,
) -> CountsTable:
    """Sample ``circuit`` from |0...0> (or ``initial``) under ``noise``.

    ``qubits`` defaults to the circuit's measured qubits in classical-bit order.
    A zero model takes the statevector path and matches :func:`sample_counts`.
    """
    unitary, measured = split_measurements(circuit)
    qubits = list(qubits) if qubits is not None else measured
    if not qubits:
        raise SimulationError("nothing to measure")
    state = initial if initial is not None else Statevector.zero(circuit.n_qubits)
    if noise.is_zero:
        return sample_counts(run_circuit(state, unitary), qubits, shots, seed)
    if circuit.n_qubits > MAX_DENSITY_QUBITS:
        raise SimulationError(f"density simulation is limited to {MAX_DENSITY_QUBITS} qubits")
    rho = evolve_noisy(density_from_state(state), unitary, noise)
    return sample_density(rho, qubits, shots, seed, noise.p_readout)

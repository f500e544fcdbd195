"""Linear cluster states and the Z-state basis built from them.

A Z-state is the cluster state with phase flips on a subset of qubits.
For two and three qubits the index ``k`` follows the published
enumeration; for four or more qubits ``k`` is the binary expansion of the
flipped set with qubit 1 as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clusterz.core import QuantumCircuit, Statevector, run_circuit

# k -> qubits receiving Z, read off the published column vectors
_PATTERN_TABLES: dict[int, tuple[frozenset[int], ...]] = {
    2: tuple(map(frozenset, ([], [1], [2], [1, 2]))),
    3: tuple(map(frozenset, ([], [3], [1], [1, 3], [2], [2, 3], [1, 2], [1, 2, 3]))),
}


@dataclass(frozen=True)
class ZPattern:
    n_qubits: int
    qubits_with_z: frozenset[int]

    def sorted(self) -> list[int]:
        return sorted(self.qubits_with_z)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"cluster states need at least 2 qubits, got {n}")


def _check_index(n: int, k: int) -> None:
    _check_n(n)
    if not 0 <= k < 2**n:
        raise ValueError(f"Z-state index {k} out of range 0..{2**n - 1}")


def cluster_signs(n: int) -> np.ndarray:
    """(-1)^(sum b_i b_{i+1}) for every basis state, qubit 1 most significant."""
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    parity = (bits[:, :-1] & bits[:, 1:]).sum(axis=1) & 1
    return 1 - 2 * parity


def cluster_state(n: int) -> Statevector:
    _check_n(n)
    return Statevector(n, cluster_signs(n) / np.sqrt(2**n))


def cluster_circuit(n: int) -> QuantumCircuit:
    """Hadamard on every qubit followed by CZ along the chain."""
    _check_n(n)
    circ = QuantumCircuit(n)
    for q in range(1, n + 1):
        circ.h(q)
    for q in range(1, n):
        circ.cz(q, q + 1)
    return circ


def z_pattern(n: int, k: int) -> ZPattern:
    _check_index(n, k)
    if n in _PATTERN_TABLES:
        return ZPattern(n, _PATTERN_TABLES[n][k])
    return ZPattern(n, frozenset(j for j in range(1, n + 1) if (k >> (n - j)) & 1))


def pattern_index(n: int, qubits_with_z) -> int:
    """Inverse of :func:`z_pattern`."""
    _check_n(n)
    target = frozenset(qubits_with_z)
    if n in _PATTERN_TABLES:
        return _PATTERN_TABLES[n].index(target)
    if not target <= set(range(1, n + 1)):
        raise ValueError(f"qubits {sorted(target)} out of range 1..{n}")
    return sum(1 << (n - j) for j in target)


def z_flip_signs(n: int, qubits) -> np.ndarray:
    """Diagonal of the product of Z on ``qubits``."""
    idx = np.arange(2**n)
    signs = np.ones(2**n, dtype=int)
    for j in qubits:
        signs = signs * (1 - 2 * ((idx >> (n - j)) & 1))
    return signs


def zstate_vector(n: int, k: int) -> Statevector:
    pattern = z_pattern(n, k)
    signs = cluster_signs(n) * z_flip_signs(n, pattern.qubits_with_z)
    return Statevector(n, signs / np.sqrt(2**n))


def zstate_circuit(n: int, k: int) -> QuantumCircuit:
    circ = cluster_circuit(n)
    for q in z_pattern(n, k).sorted():
        circ.z(q)
    return circ


def zbasis(n: int) -> np.ndarray:
    """All Z-states as the columns of a 2^n x 2^n matrix."""
    return np.column_stack([zstate_vector(n, k).amplitudes for k in range(2**n)])


@dataclass(frozen=True)
class BasisReport:
    n_qubits: int
    max_off_diagonal: float
    max_norm_deviation: float
    tolerance: float = 1e-12

    @property
    def ok(self) -> bool:
        return self.max_off_diagonal < self.tolerance and self.max_norm_deviation < self.tolerance


def verify_basis(n: int) -> BasisReport:
    if n > 8:
        raise ValueError("verify_basis is limited to n <= 8")
    basis = zbasis(n)
    gram = basis.conj().T @ basis
    diag = np.diag(gram).real
    off = gram - np.diag(np.diag(gram))
    return BasisReport(n, float(np.abs(off).max()), float(np.abs(diag - 1).max()))


def prepare(n: int, k: int) -> Statevector:
    """Run :func:`zstate_circuit` on the all-zero state."""
    return run_circuit(Statevector.zero(n), zstate_circuit(n, k))

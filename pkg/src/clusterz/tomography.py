"""Pauli-basis state tomography by linear inversion.

Each setting is one letter per measured qubit. X is measured after H, Y
after Sdg then H, Z directly. Outcome ``0`` is the +1 eigenvalue.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from clusterz.core import (
    CountsTable,
    DensityMatrix,
    GateInstance,
    QuantumCircuit,
    SimulationError,
    Statevector,
    apply_gate,
    density_from_state,
    marginal_probabilities,
    pauli_matrix,
    run_circuit,
    sample_counts,
)
from clusterz.discriminator import build_discrimination_circuit, syndrome_string
from clusterz.noise import NoiseModel, evolve_noisy, sample_density
from clusterz.pauli import all_pauli_strings
from clusterz.zstates import zstate_circuit, zstate_vector

DEFAULT_SHOTS = 8192


@dataclass
class TomographyPlan:
    n_qubits: int
    shots_per_setting: int = DEFAULT_SHOTS
    settings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.settings:
            self.settings = ["".join(s) for s in itertools.product("XYZ", repeat=self.n_qubits)]
        if len(set(self.settings)) != len(self.settings):
            raise ValueError("tomography settings must be distinct")
        for s in self.settings:
            if len(s) != self.n_qubits or set(s) - set("XYZ"):
                raise ValueError(f"malformed setting {s!r}")
        if self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be positive")


def rotation_gates(setting: str, qubits: Sequence[int]) -> list[GateInstance]:
    gates = []
    for letter, q in zip(setting, qubits):
        if letter == "X":
            gates.append(GateInstance("H", (q,)))
        elif letter == "Y":
            gates += [GateInstance("Sdg", (q,)), GateInstance("H", (q,))]
    return gates


def _rotated_state(state: Statevector, setting: str, qubits: Sequence[int]) -> Statevector:
    for gate in rotation_gates(setting, qubits):
        state = apply_gate(state, gate)
    return state


def _setting_seeds(seed, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


def exact_setting_probabilities(state: Statevector, plan: TomographyPlan, qubits: Sequence[int] | None = None) -> dict[str, dict[str, float]]:
    """Infinite-shot outcome distributions, usable wherever counts are accepted."""
    qubits = list(qubits or range(1, state.n_qubits + 1))
    m = len(qubits)
    out = {}
    for setting in plan.settings:
        p = marginal_probabilities(_rotated_state(state, setting, qubits).probabilities(), state.n_qubits, qubits)
        out[setting] = {format(i, f"0{m}b"): float(v) for i, v in enumerate(p)}
    return out


def measure_settings(state: Statevector, plan: TomographyPlan, seed=None, qubits: Sequence[int] | None = None) -> dict[str, CountsTable]:
    """Sample every setting from independent child seeds of ``seed``."""
    qubits = list(qubits or range(1, state.n_qubits + 1))
    if len(qubits) != plan.n_qubits:
        raise ValueError("plan size does not match measured qubits")
    seeds = _setting_seeds(seed, len(plan.settings))
    return {
        setting: sample_counts(_rotated_state(state, setting, qubits), qubits, plan.shots_per_setting, s)
        for setting, s in zip(plan.settings, seeds)
    }


def measure_settings_noisy(rho: DensityMatrix, plan: TomographyPlan, noise: NoiseModel, seed=None, qubits: Sequence[int] | None = None) -> dict[str, CountsTable]:
    qubits = list(qubits or range(1, rho.n_qubits + 1))
    seeds = _setting_seeds(seed, len(plan.settings))
    out = {}
    for setting, s in zip(plan.settings, seeds):
        rot = QuantumCircuit(rho.n_qubits, 0, rotation_gates(setting, qubits))
        rotated = evolve_noisy(rho, rot, noise)
        out[setting] = sample_density(rotated, qubits, plan.shots_per_setting, s, noise.p_readout)
    return out


def _as_weights(counts) -> dict[str, float]:
    if isinstance(counts, CountsTable):
        return counts.counts
    return dict(counts)


def estimate_expectations(counts: Mapping[str, CountsTable | Mapping[str, float]]) -> dict[str, float]:
    """Pauli expectation values from per-setting counts.

    Every setting whose letters cover a Pauli string's support contributes,
    weighted by its shot total.
    """
    if not counts:
        raise ValueError("no settings given")
    n = len(next(iter(counts)))
    needed = {"".join(s) for s in itertools.product("XYZ", repeat=n)}
    missing = needed - set(counts)
    if missing:
        raise ValueError(f"missing settings: {sorted(missing)}")

    tables = {}
    for setting, table in counts.items():
        weights = _as_weights(table)
        total = float(sum(weights.values()))
        if total <= 0:
            raise ValueError(f"setting {setting} has zero shots")
        keys = list(weights)
        bits = np.array([[int(c) for c in k] for k in keys], dtype=int).reshape(len(keys), n)
        tables[setting] = (bits, np.array([weights[k] for k in keys], dtype=float), total)

    expectations = {"I" * n: 1.0}
    for pauli in all_pauli_strings(n):
        if pauli.is_identity:
            continue
        support = [q - 1 for q in pauli.support]
        num = den = 0.0
        for setting, (bits, w, total) in tables.items():
            if all(setting[j] == pauli.letters[j] for j in support):
                parity = bits[:, support].sum(axis=1) & 1
                num += float(w @ (1 - 2 * parity))
                den += total
        expectations[pauli.letters] = num / den
    return expectations


def linear_inversion(expectations: Mapping[str, float], n: int) -> DensityMatrix:
    """rho = 2^-n sum_P <P> P over all 4^n Pauli strings."""
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for pauli in all_pauli_strings(n):
        if pauli.letters not in expectations:
            raise ValueError(f"expectation of {pauli} missing")
        rho += expectations[pauli.letters] * pauli_matrix(pauli)
    return DensityMatrix(n, rho / 2**n, raw=True)


def _project_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``values`` onto {x >= 0, sum x = 1}."""
    u = np.sort(values)[::-1]
    css = np.cumsum(u) - 1
    ks = np.arange(1, u.size + 1)
    rho = ks[u - css / ks > 0][-1]
    theta = css[rho - 1] / rho
    return np.maximum(values - theta, 0)


def project_to_physical(raw: DensityMatrix, atol: float = 1e-8) -> DensityMatrix:
    """Nearest (Frobenius) positive semidefinite, unit-trace matrix."""
    if not raw.is_hermitian(atol):
        raise SimulationError("projection requires a Hermitian matrix")
    m = (raw.entries + raw.entries.conj().T) / 2
    vals, vecs = np.linalg.eigh(m)
    new = _project_simplex(vals)
    return DensityMatrix(raw.n_qubits, (vecs * new) @ vecs.conj().T)


FIDELITY_CONVENTIONS = ("sqrt", "squared")


def fidelity_pure(target: Statevector, rho: DensityMatrix, convention: str = "squared") -> float:
    """<psi|rho|psi>, or its square root under the ``"sqrt"`` convention.

    Clamped to [0, 1] unless ``rho`` is a raw estimate.
    """
    if convention not in FIDELITY_CONVENTIONS:
        raise ValueError(f"unknown fidelity convention {convention!r}")
    if target.n_qubits != rho.n_qubits:
        raise SimulationError("target and density matrix sizes differ")
    if not rho.is_hermitian(1e-8):
        raise SimulationError("fidelity requires a Hermitian matrix")
    psi = target.amplitudes
    f = float(np.vdot(psi, rho.entries @ psi).real)
    if not rho.raw:
        f = min(max(f, 0.0), 1.0)
    if convention == "sqrt":
        f = float(np.sqrt(f)) if f >= 0 else float("nan")
    return f


def fidelity_report(target: Statevector, rho: DensityMatrix) -> dict:
    return {
        "sqrt": fidelity_pure(target, rho, "sqrt"),
        "squared": fidelity_pure(target, rho, "squared"),
        "raw": rho.raw,
    }


def reverse_qubits(state: Statevector) -> Statevector:
    """Same state with the register order reversed (qubit 1 <-> qubit n)."""
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n).transpose(list(reversed(range(n))))
    return Statevector(n, t.reshape(-1))


def reconstruct(counts: Mapping[str, CountsTable | Mapping[str, float]]) -> DensityMatrix:
    n = len(next(iter(counts)))
    return linear_inversion(estimate_expectations(counts), n)


@dataclass
class TomographyResult:
    target: str
    measured_qubits: list[int]
    target_state: Statevector
    counts: dict[str, CountsTable]
    raw: DensityMatrix
    physical: DensityMatrix

    @property
    def fidelity(self) -> dict:
        return {
            "raw": fidelity_report(self.target_state, self.raw),
            "projected": fidelity_report(self.target_state, self.physical),
        }


def tomography_end_to_end(
    n: int,
    k: int,
    target: str = "state",
    plan: TomographyPlan | None = None,
    seed=None,
    noise: NoiseModel | None = None,
) -> TomographyResult:
    """Prepare |Z_n^k>, run the discrimination circuit, then tomograph the data or ancilla register.

    Ancilla tomography uses readout order, so the ideal result is the
    projector onto the readout string of ``k``.
    """
    if target not in ("state", "ancilla"):
        raise ValueError(f"target must be 'state' or 'ancilla', got {target!r}")
    dc = build_discrimination_circuit(n)
    full = QuantumCircuit(2 * n)
    full.extend(zstate_circuit(n, k).gates)
    full.extend(dc.unitary_part().gates)

    if target == "state":
        qubits = list(range(1, n + 1))
        ideal = zstate_vector(n, k)
    else:
        qubits = dc.readout_order
        ideal = Statevector.from_bits(syndrome_string(n, k))
    plan = plan or TomographyPlan(len(qubits))
    if plan.n_qubits != len(qubits):
        raise ValueError(f"plan covers {plan.n_qubits} qubits, target has {len(qubits)}")

    noise = noise or NoiseModel()
    if noise.is_zero:
        final = run_circuit(Statevector.zero(2 * n), full)
        counts = measure_settings(final, plan, seed, qubits)
    else:
        rho = evolve_noisy(density_from_state(Statevector.zero(2 * n)), full, noise)
        counts = measure_settings_noisy(rho, plan, noise, seed, qubits)

    raw = reconstruct(counts)
    return TomographyResult(target, qubits, ideal, counts, raw, project_to_physical(raw))

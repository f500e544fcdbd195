"""JSON and CSV serialization of counts, density matrices and reports."""

from __future__ import annotations

import csv
import io
import json
from importlib import resources
from pathlib import Path

import numpy as np

from clusterz.core import CountsTable, DensityMatrix

SCHEMA_VERSION = 1
FIXTURE_NAMES = (
    "rho_theory_state",
    "rho_sim_state",
    "rho_run_state",
    "rho_theory_ancilla",
    "rho_sim_ancilla",
    "rho_run_ancilla",
)


def _clean(x: float) -> float:
    # drop negative zero so equal matrices serialize to equal bytes
    return float(x) + 0.0


def density_to_dict(rho: DensityMatrix) -> dict:
    m = rho.entries
    return {
        "n_qubits": rho.n_qubits,
        "real": [[_clean(v) for v in row] for row in m.real],
        "imag": [[_clean(v) for v in row] for row in m.imag],
        "raw": rho.raw,
    }


def density_from_dict(data: dict) -> DensityMatrix:
    n = int(data["n_qubits"])
    dim = 2**n
    re = np.asarray(data["real"], dtype=float).reshape(dim, dim)
    im = np.asarray(data.get("imag", np.zeros((dim, dim))), dtype=float).reshape(dim, dim)
    return DensityMatrix(n, re + 1j * im, raw=bool(data.get("raw", True)))


def load_density(path: str | Path) -> DensityMatrix:
    return density_from_dict(json.loads(Path(path).read_text()))


def fixture_path(name: str) -> Path:
    name = name.removesuffix(".json")
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return Path(str(resources.files("clusterz") / "fixtures" / f"{name}.json"))


def load_fixture(name: str) -> DensityMatrix:
    return load_density(fixture_path(name))


def resolve_matrix_path(path: str) -> Path:
    """Use ``path`` if it exists, else fall back to a bundled fixture of the same name."""
    p = Path(path)
    if p.exists():
        return p
    stem = p.stem
    if stem in FIXTURE_NAMES:
        return fixture_path(stem)
    raise FileNotFoundError(path)


def dumps(data: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, data: dict) -> None:
    Path(path).write_text(dumps(data))


def counts_to_dict(counts: CountsTable) -> dict:
    return counts.to_dict()


def density_csv(rho: DensityMatrix) -> str:
    """One row per (row, column) basis pair with real and imaginary parts."""
    n = rho.n_qubits
    labels = [format(i, f"0{n}b") for i in range(2**n)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "real", "imag"])
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            v = rho.entries[i, j]
            w.writerow([a, b, repr(_clean(v.real)), repr(_clean(v.imag))])
    return buf.getvalue()


def schema(name: str) -> dict:
    text = (resources.files("clusterz") / "schemas" / f"{name}.schema.json").read_text()
    return json.loads(text)

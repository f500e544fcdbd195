from __future__ import annotations

import itertools
from dataclasses import dataclass


class PauliError(ValueError):
    pass


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis; ``letters[0]`` acts on qubit 1."""

    letters: str

    def __post_init__(self):
        if not self.letters or set(self.letters) - set("IXYZ"):
            raise PauliError(f"malformed Pauli label {self.letters!r}")

    @classmethod
    def parse(cls, label: str) -> "PauliString":
        return cls(label.strip().upper())

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: dict[int, str]) -> "PauliString":
        """Build from ``{qubit: letter}`` with 1-based qubits."""
        letters = ["I"] * n_qubits
        for q, letter in ops.items():
            letters[q - 1] = letter
        return cls("".join(letters))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        """1-based qubits carrying a non-identity letter."""
        return tuple(i + 1 for i, c in enumerate(self.letters) if c != "I")

    @property
    def is_identity(self) -> bool:
        return not self.support

    def commutes_with(self, other: "PauliString") -> bool:
        clashes = sum(
            a != "I" and b != "I" and a != b for a, b in zip(self.letters, other.letters)
        )
        return clashes % 2 == 0

    def __str__(self):
        return self.letters


def all_pauli_strings(n_qubits: int) -> list[PauliString]:
    return [PauliString("".join(p)) for p in itertools.product("IXYZ", repeat=n_qubits)]

"""Command-line entry point: ``clusterz {gen,discriminate,tomo,fidelity,verify}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from clusterz import io
from clusterz.core import QuantumCircuit, Statevector, density_from_state
from clusterz.discriminator import (
    build_discrimination_circuit,
    decode_ancilla,
    run_discrimination,
    syndrome_string,
)
from clusterz.noise import NoiseModel, evolve_noisy, noisy_counts
from clusterz.qasm import emit_qasm
from clusterz.tomography import (
    TomographyPlan,
    fidelity_pure,
    reverse_qubits,
    tomography_end_to_end,
)
from clusterz.zstates import verify_basis, zstate_circuit, zstate_vector

SEED_ENV = "CLUSTERZ_SEED"


@dataclass
class ExperimentConfig:
    command: str
    n: int
    k: int
    shots: int = 8192
    seed: int = 0
    noise: dict = field(default_factory=lambda: NoiseModel().to_dict())
    tomography: bool = False
    target: str | None = None
    out: str | None = None
    csv: str | None = None

    @property
    def noise_model(self) -> NoiseModel:
        return NoiseModel.from_dict(self.noise)

    def to_dict(self) -> dict:
        return asdict(self)


def full_circuit(n: int, k: int, discriminate: bool = True) -> QuantumCircuit:
    """Preparation of |Z_n^k> on the data qubits, optionally followed by the discrimination gadgets."""
    prep = zstate_circuit(n, k)
    if not discriminate:
        return prep
    dc = build_discrimination_circuit(n)
    circ = QuantumCircuit(2 * n, n)
    circ.extend(prep.gates)
    circ.extend(dc.circuit.gates)
    return circ


def run_discriminate(cfg: ExperimentConfig) -> dict:
    n, k = cfg.n, cfg.k
    noise = cfg.noise_model
    circ = full_circuit(n, k)
    counts = noisy_counts(circ, noise, shots=cfg.shots, seed=cfg.seed)
    modal = counts.most_common()
    target = zstate_vector(n, k)
    if noise.is_zero:
        post = run_discrimination(target, cfg.seed).post_state
        fid = target.overlap(post)
    else:
        rho = evolve_noisy(density_from_state(Statevector.zero(2 * n)), QuantumCircuit(2 * n, 0, circ.unitary_gates()), noise)
        fid = fidelity_pure(target, rho.partial_trace(range(1, n + 1)), "squared")
    return {
        "schema_version": io.SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "counts": counts.to_dict(),
        "modal_readout": modal,
        "expected_readout": syndrome_string(n, k),
        "decoded_index": decode_ancilla(modal, n),
        "post_state_fidelity": round(float(fid), 12),
    }


def run_tomo(cfg: ExperimentConfig):
    result = tomography_end_to_end(
        cfg.n, cfg.k, cfg.target, TomographyPlan(cfg.n, cfg.shots), cfg.seed, cfg.noise_model
    )
    doc = {
        "schema_version": io.SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "measured_qubits": result.measured_qubits,
        "raw": io.density_to_dict(result.raw),
        "projected": io.density_to_dict(result.physical),
        "fidelity": result.fidelity,
    }
    return doc, result


def run_verify(n: int) -> tuple[bool, str]:
    lines = []
    basis = verify_basis(n) if n <= 8 else None
    ok = True
    if basis is not None:
        lines.append(
            f"basis: max off-diagonal {basis.max_off_diagonal:.3e}, "
            f"max norm deviation {basis.max_norm_deviation:.3e} -> {'ok' if basis.ok else 'FAIL'}"
        )
        ok &= basis.ok
    syndromes = {}
    for k in range(2**n):
        state = zstate_vector(n, k)
        first = run_discrimination(state, seed=k)
        second = run_discrimination(first.post_state, seed=k + 1)
        fid = min(state.overlap(first.post_state), state.overlap(second.post_state))
        good = first.k == k and second.k == k and first.bits == second.bits and fid >= 1 - 1e-10
        ok &= good
        syndromes[k] = first.bits
        lines.append(f"k={k:>3}  readout {first.bits}  decoded {first.k:>3}  fidelity {fid:.12f}  {'ok' if good else 'FAIL'}")
    distinct = len(set(syndromes.values()))
    ok &= distinct == 2**n
    lines.append(f"{distinct} distinct syndromes for {2**n} Z-states -> {'ok' if distinct == 2**n else 'FAIL'}")
    return ok, "\n".join(lines)


def _noise_arg(text: str) -> NoiseModel:
    try:
        if text.endswith(".json") or text.startswith("@"):
            return NoiseModel.from_dict(json.loads(Path(text.lstrip("@")).read_text()))
        return NoiseModel.parse(text)
    except (ValueError, OSError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clusterz", description="Cluster/Z-state discrimination experiments")
    sub = p.add_subparsers(dest="command", required=True)

    def experiment(sp, shots=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        if shots:
            sp.add_argument("--shots", type=_positive, default=8192)
            sp.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV} or 0")
            sp.add_argument("--noise", type=_noise_arg, default=NoiseModel(),
                            help='"depol:<p1>,<p2>;readout:<p>" or a JSON file')
        sp.add_argument("--out")

    gen = sub.add_parser("gen", help="write QASM for a Z-state preparation circuit")
    experiment(gen, shots=False)
    gen.add_argument("--discriminate", action="store_true")

    disc = sub.add_parser("discriminate", help="prepare, discriminate and report counts")
    experiment(disc)

    tomo = sub.add_parser("tomo", help="state or ancilla tomography after discrimination")
    tomo.add_argument("--target", choices=("state", "ancilla"), required=True)
    experiment(tomo)
    tomo.add_argument("--csv", help="also write bar-plot data for the projected matrix")

    fid = sub.add_parser("fidelity", help="fidelity of a stored density matrix with a Z-state")
    fid.add_argument("--rho", required=True)
    fid.add_argument("--target", required=True, help="zstate:N:K")
    fid.add_argument("--reversed", action="store_true", help="reverse the target's qubit order")
    fid.add_argument("--convention", choices=("sqrt", "squared"), default="sqrt")
    fid.add_argument("--out")

    ver = sub.add_parser("verify", help="basis, determinism and non-destructiveness checks")
    ver.add_argument("--n", type=int, required=True)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, command: str) -> ExperimentConfig:
    return ExperimentConfig(
        command=command,
        n=args.n,
        k=args.k,
        shots=args.shots,
        seed=args.seed if args.seed is not None else _default_seed(),
        noise=args.noise.to_dict(),
        tomography=command == "tomo",
        target=getattr(args, "target", None),
        out=args.out,
        csv=getattr(args, "csv", None),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command in ("gen", "discriminate", "tomo", "verify"):
        if args.n < 2:
            parser.error("--n must be at least 2")
    if args.command in ("gen", "discriminate", "tomo") and not 0 <= args.k < 2**args.n:
        parser.error(f"--k must lie in 0..{2**args.n - 1}")

    if args.command == "gen":
        _emit(emit_qasm(full_circuit(args.n, args.k, args.discriminate)), args.out)
        return 0

    if args.command == "discriminate":
        if 2 * args.n > 12 and not args.noise.is_zero:
            parser.error("noisy runs are limited to 12 qubits in total")
        doc = run_discriminate(_config(args, "discriminate"))
        _emit(io.dumps(doc), args.out)
        if args.out:
            print(f"decoded index {doc['decoded_index']}, readout {doc['modal_readout']}")
        return 0

    if args.command == "tomo":
        doc, result = run_tomo(_config(args, "tomo"))
        _emit(io.dumps(doc), args.out)
        if args.csv:
            Path(args.csv).write_text(io.density_csv(result.physical))
        if args.out:
            f = doc["fidelity"]["projected"]
            print(f"fidelity sqrt={f['sqrt']:.6f} squared={f['squared']:.6f}")
        return 0

    if args.command == "fidelity":
        try:
            kind, n, k = args.target.split(":")
            n, k = int(n), int(k)
            if kind != "zstate":
                raise ValueError
            target = zstate_vector(n, k)
        except ValueError:
            parser.error(f"--target must look like zstate:N:K with a valid index, got {args.target!r}")
        try:
            rho = io.load_density(io.resolve_matrix_path(args.rho))
        except FileNotFoundError:
            parser.error(f"no such matrix file: {args.rho}")
        if args.reversed:
            target = reverse_qubits(target)
        value = fidelity_pure(target, rho, args.convention)
        if args.out:
            io.write_json(args.out, {
                "schema_version": io.SCHEMA_VERSION, "rho": args.rho, "target": args.target,
                "reversed": args.reversed, "convention": args.convention, "fidelity": value,
            })
        print(f"{value:.6f}")
        return 0

    if args.command == "verify":
        ok, report = run_verify(args.n)
        print(report)
        return 0 if ok else 1
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())

"""Cluster states, Z-state discrimination and tomography by dense simulation."""

from clusterz.core import (
    CountsTable,
    DensityMatrix,
    GateInstance,
    QuantumCircuit,
    Statevector,
    apply_gate,
    density_from_state,
    evolve_density,
    measure_and_collapse,
    pauli_expectation,
    run_circuit,
    sample_counts,
)
from clusterz.discriminator import (
    build_discrimination_circuit,
    decode_ancilla,
    discriminate,
    stabilizer_generators,
)
from clusterz.noise import NoiseModel, apply_depolarizing, noisy_counts
from clusterz.pauli import PauliString
from clusterz.qasm import emit_qasm, parse_qasm
from clusterz.tomography import (
    TomographyPlan,
    estimate_expectations,
    fidelity_pure,
    linear_inversion,
    project_to_physical,
    tomography_end_to_end,
)
from clusterz.zstates import (
    cluster_circuit,
    cluster_state,
    verify_basis,
    z_pattern,
    zstate_circuit,
    zstate_vector,
)

__version__ = "0.1.0"

"""Variational-circuit training with sequentially assembled cost Hamiltonians.

The package covers the full pipeline: graph-coloring instances and their
diagonal cost Hamiltonians (:mod:`seqham.problems`), Pauli-sum algebra
and partial assembly (:mod:`seqham.pauli`), a dense statevector
simulator (:mod:`seqham.simulator`), a circuit-architecture catalog plus
the alternating-operator circuit (:mod:`seqham.ansatz`), derivative-free
training with shot-based objectives (:mod:`seqham.optimize`), the
training schedules themselves (:mod:`seqham.strategies`), and a seeded,
resumable benchmark harness (:mod:`seqham.bench`, CLI in
:mod:`seqham.cli`).
"""

__version__ = "0.1.0"

from .ansatz import (
    ArchitectureId,
    Circuit,
    Layer,
    build_ansatz,
    build_qaoa,
    constant_speed_init,
    verify_identity_at_zero,
)
from .bench import ExperimentConfig, MetricRow, accuracy, aggregate, most_likely_accuracy, run_matrix
from .optimize import OptimConfig, OptimResult, SeedPolicy, make_objective, minimize, parameter_shift_gradient
from .pauli import (
    Partition,
    PauliSum,
    PauliTerm,
    assemble_prefix,
    expectation_exact,
    expectation_shots,
    locality_histogram,
    simplify,
)
from .problems import (
    GraphInstance,
    coloring_hamiltonian,
    count_proper_colorings,
    generate_graph,
    is_connected,
    is_proper,
)
from .simulator import (
    Gate,
    GateKind,
    ShotHistogram,
    Statevector,
    apply_gate,
    exact_probabilities,
    new_zero_state,
    run_circuit,
    sample_shots,
)
from .strategies import (
    LayerwiseParams,
    PartitionStrategy,
    RunRecord,
    StrategyKind,
    StrategySpec,
    TrainingConfig,
    partition_chronological,
    partition_nodewise,
    partition_random,
    train,
    train_ll,
    train_lvqe,
    train_qaoa,
    train_sha,
    train_svqe,
)

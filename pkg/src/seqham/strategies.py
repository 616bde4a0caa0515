"""Training schedules: plain VQE, sequential Hamiltonian assembly, layerwise
circuit growth, the alternating-operator baseline, and their hybrids.

Every schedule is a sequence of stages.  A stage minimizes one objective
(a possibly partial Hamiltonian, a possibly partial circuit, a possibly
masked parameter set) with the derivative-free optimizer, warm-starting
from the previous stage's best parameters.  Stages that train a subset
(of Hamiltonian terms or of parameters) stop coarsely (threshold 0.8, an
anti-overfitting measure); the final full stage runs to the fine
threshold 1e-6.  Non-final stages get ``max_iters // n_stages``
evaluations by default, the final stage gets ``max_iters``.

Shot seeds derive from the run seed and the stage's position, so a run
is fully reproducible, and degenerate schedules coincide exactly: a
single-block assembly run is bit-identical to plain VQE under the same
seed.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ansatz import (
    ArchitectureId,
    Circuit,
    build_ansatz,
    build_qaoa,
    constant_speed_init,
    prepend_ry_layer,
    ry_layer,
)
from .optimize import OptimConfig, OptimResult, SeedPolicy, make_objective, minimize
from .pauli import Partition, PauliSum, assemble_prefix, simplify, validate_partition
from .problems import GraphInstance, bfs_node_order, proper_mask
from .simulator import shot_rng


class PartitionStrategy(Enum):
    RANDOM = "random"
    CHRONOLOGICAL = "chronological"
    NODEWISE = "nodewise"


class StrategyKind(Enum):
    SVQE = "svqe"
    SHA = "sha"
    LL = "ll"
    LVQE = "lvqe"
    QAOA = "qaoa"
    SHA_LL = "sha_ll"
    SHA_LVQE = "sha_lvqe"


SHA_KINDS = frozenset({StrategyKind.SHA, StrategyKind.SHA_LL, StrategyKind.SHA_LVQE})


@dataclass(frozen=True)
class LayerwiseParams:
    """Hyperparameters of layerwise growth: start with ``start_layers``
    layers, add ``grow_step`` at a time, train the last ``train_window``
    layers, then sweep windows covering a ``sweep_fraction`` of all layers."""

    start_layers: int = 1
    grow_step: int = 1
    train_window: int = 1
    sweep_fraction: float = 1.0

    def __post_init__(self):
        if min(self.start_layers, self.grow_step, self.train_window) < 1:
            raise ValueError("start_layers, grow_step and train_window must be >= 1")
        if not 0.0 <= self.sweep_fraction <= 1.0:
            raise ValueError("sweep_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class StrategySpec:
    """Declarative description of one training schedule."""

    kind: StrategyKind
    partition_strategy: Optional[PartitionStrategy] = None
    n_partitions: Optional[int] = None
    per_stage_max_iters: Optional[Tuple[int, ...]] = None
    ll_params: Optional[LayerwiseParams] = None
    qaoa_p: int = 3

    def __post_init__(self):
        if self.kind in SHA_KINDS:
            if self.partition_strategy is None or self.n_partitions is None:
                raise ValueError(f"{self.kind.value} needs partition_strategy and n_partitions")
            if self.n_partitions < 1:
                raise ValueError("n_partitions must be >= 1")
        if self.kind is StrategyKind.QAOA and self.qaoa_p < 1:
            raise ValueError("qaoa_p must be >= 1")

    @property
    def label(self) -> str:
        if self.kind in SHA_KINDS:
            short = {"random": "RD", "chronological": "SQ", "nodewise": "NW"}[
                self.partition_strategy.value
            ]
            base = f"SHA-{short}{self.n_partitions}"
            if self.kind is StrategyKind.SHA_LL:
                return f"{base}+LL"
            if self.kind is StrategyKind.SHA_LVQE:
                return f"{base}+LVQE"
            return base
        if self.kind is StrategyKind.QAOA:
            return f"QAOA{self.qaoa_p}"
        return {StrategyKind.SVQE: "SVQE", StrategyKind.LL: "LL", StrategyKind.LVQE: "L-VQE"}[
            self.kind
        ]


def parse_strategy_spec(text: str) -> StrategySpec:
    """Parse the config/CLI syntax, e.g. ``svqe``, ``sha:nodewise:4``,
    ``ll:1,1,1,1.0``, ``qaoa:3``, ``sha_lvqe:chronological:2``."""
    fields = [f.strip() for f in text.strip().lower().split(":")]
    kind = StrategyKind(fields[0])
    if kind in SHA_KINDS:
        if len(fields) != 3:
            raise ValueError(f"{kind.value} spec needs partition strategy and block count: {text!r}")
        return StrategySpec(
            kind=kind,
            partition_strategy=PartitionStrategy(fields[1]),
            n_partitions=int(fields[2]),
        )
    if kind is StrategyKind.QAOA:
        return StrategySpec(kind=kind, qaoa_p=int(fields[1]) if len(fields) > 1 else 3)
    if kind is StrategyKind.LL and len(fields) > 1:
        s, p, q, r = (fields[1].split(",") + ["1", "1", "1.0"])[:4]
        return StrategySpec(
            kind=kind,
            ll_params=LayerwiseParams(int(s), int(p), int(q), float(r)),
        )
    return StrategySpec(kind=kind)


@dataclass(frozen=True)
class TrainingConfig:
    """Run-level knobs shared by all schedules."""

    max_iters: int = 4000
    coarse_threshold: float = 0.8
    fine_threshold: float = 1e-6
    initial_step: float = 0.5
    shots: Optional[int] = 200
    seed: int = 0
    graph: Optional[GraphInstance] = None
    shot_metrics: bool = False


@dataclass
class StageRecord:
    label: str
    circuit: Circuit
    hamiltonian: PauliSum
    trainable_slots: Tuple[int, ...]
    start_params: np.ndarray
    end_params: np.ndarray
    result: OptimResult


@dataclass
class RunRecord:
    strategy_label: str
    graph_name: str
    architecture: str
    seed: int
    stages: List[StageRecord]
    final_circuit: Circuit
    final_params: np.ndarray
    total_iterations: int
    metric_trace: List[Tuple[float, bool]]


# ---------------------------------------------------------------------------
# Partition builders


def _block_sizes(n_items: int, n_blocks: int) -> List[int]:
    # Larger blocks first when sizes cannot be equal.
    small, extra = divmod(n_items, n_blocks)
    return [small + 1] * extra + [small] * (n_blocks - extra)


def partition_random(n_terms: int, n_blocks: int, seed: int) -> Partition:
    """Equally sized disjoint blocks with seeded random membership."""
    if not 1 <= n_blocks <= n_terms:
        raise ValueError(f"n_blocks={n_blocks} outside [1, {n_terms}]")
    permutation = shot_rng(seed).permutation(n_terms)
    blocks = []
    cursor = 0
    for size in _block_sizes(n_terms, n_blocks):
        blocks.append(tuple(sorted(int(i) for i in permutation[cursor : cursor + size])))
        cursor += size
    return Partition(tuple(blocks), tuple(f"RD{j + 1}" for j in range(n_blocks)))


def partition_chronological(n_terms: int, n_blocks: int) -> Partition:
    """Equally sized disjoint blocks of contiguous indices in input order."""
    if not 1 <= n_blocks <= n_terms:
        raise ValueError(f"n_blocks={n_blocks} outside [1, {n_terms}]")
    blocks = []
    cursor = 0
    for size in _block_sizes(n_terms, n_blocks):
        blocks.append(tuple(range(cursor, cursor + size)))
        cursor += size
    return Partition(tuple(blocks), tuple(f"SQ{j + 1}" for j in range(n_blocks)))


def partition_nodewise(graph: GraphInstance, h: PauliSum, n_blocks: Optional[int] = None) -> Partition:
    """Problem-informed blocks: all term indices touching a node group.

    Nodes are ordered by breadth-first traversal from node 0 and split
    into ``n_blocks`` contiguous groups; block ``j`` collects the indices
    of every term whose source edge touches a node of group ``j`` (the
    per-edge identity components travel with their edge).  Blocks overlap
    wherever an edge spans two groups, and every prefix union covers
    exactly the edges incident to the first groups.
    """
    if not graph.edges:
        raise ValueError("nodewise partitioning needs at least one edge")
    if len(h.terms) % len(graph.edges):
        raise ValueError(
            "Hamiltonian term count is not a multiple of the edge count; "
            "pass the unsimplified per-edge expansion"
        )
    n_blocks = graph.n_nodes if n_blocks is None else n_blocks
    if not 1 <= n_blocks <= graph.n_nodes:
        raise ValueError(f"n_blocks={n_blocks} outside [1, {graph.n_nodes}]")
    per_edge = len(h.terms) // len(graph.edges)
    order = bfs_node_order(graph)
    groups = []
    cursor = 0
    for size in _block_sizes(graph.n_nodes, n_blocks):
        groups.append(set(order[cursor : cursor + size]))
        cursor += size
    blocks = []
    for group in groups:
        indices = []
        for edge_index, (u, v) in enumerate(graph.edges):
            if u in group or v in group:
                indices.extend(range(edge_index * per_edge, (edge_index + 1) * per_edge))
        blocks.append(tuple(sorted(indices)))
    return Partition(tuple(blocks), tuple(f"NW{j + 1}" for j in range(n_blocks)))


def build_partition(
    strategy: PartitionStrategy,
    n_blocks: int,
    graph: GraphInstance,
    h: PauliSum,
    seed: int,
) -> Partition:
    if strategy is PartitionStrategy.RANDOM:
        return partition_random(len(h.terms), n_blocks, seed)
    if strategy is PartitionStrategy.CHRONOLOGICAL:
        return partition_chronological(len(h.terms), n_blocks)
    return partition_nodewise(graph, h, n_blocks)


# ---------------------------------------------------------------------------
# Stage plumbing


@dataclass
class _StagePlan:
    label: str
    circuit: Circuit
    hamiltonian: PauliSum  # already simplified
    trainable_slots: Tuple[int, ...]
    threshold: float
    x0_override: Optional[np.ndarray] = None


class _Session:
    """Executes a stage plan with warm starts and metric tracing."""

    def __init__(self, cfg: TrainingConfig):
        self.cfg = cfg
        self.mask = proper_mask(cfg.graph) if cfg.graph is not None else None
        self.metric_trace: List[Tuple[float, bool]] = []
        self.stages: List[StageRecord] = []
        self._stage_index = 0

    def _observer(self, state, indices) -> None:
        if self.mask is None:
            return
        probs = np.abs(state.amplitudes) ** 2
        if self.cfg.shot_metrics and indices is not None:
            acc = float(self.mask[indices].mean())
        else:
            acc = float(probs @ self.mask)
        if indices is not None:
            values, counts = np.unique(indices, return_counts=True)
            modal = int(values[int(np.argmax(counts))])
        else:
            modal = int(np.argmax(probs))
        self.metric_trace.append((acc, bool(self.mask[modal])))

    def run_stage(self, plan: _StagePlan, params: np.ndarray, budget: int) -> np.ndarray:
        trainable = np.asarray(plan.trainable_slots, dtype=int)
        objective = make_objective(
            plan.circuit,
            plan.hamiltonian,
            shots=self.cfg.shots,
            seed_policy=SeedPolicy("fresh", self.cfg.seed, self._stage_index),
            observer=self._observer,
        )
        full = params.copy()

        def masked(x: np.ndarray) -> float:
            full[trainable] = x
            return objective(full)

        x0 = plan.x0_override[trainable] if plan.x0_override is not None else params[trainable]
        result = minimize(
            masked,
            x0,
            OptimConfig(
                max_iters=budget,
                progress_threshold=plan.threshold,
                initial_step=self.cfg.initial_step,
                seed=self.cfg.seed,
            ),
        )
        end_params = params.copy()
        end_params[trainable] = result.best_params
        self.stages.append(
            StageRecord(
                label=plan.label,
                circuit=plan.circuit,
                hamiltonian=plan.hamiltonian,
                trainable_slots=tuple(int(s) for s in trainable),
                start_params=(plan.x0_override if plan.x0_override is not None else params).copy(),
                end_params=end_params.copy(),
                result=result,
            )
        )
        self._stage_index += 1
        return end_params

    def finish(self, record_fields: Dict, final_circuit: Circuit, final_params: np.ndarray) -> RunRecord:
        return RunRecord(
            stages=self.stages,
            final_circuit=final_circuit,
            final_params=final_params,
            total_iterations=sum(s.result.iterations_used for s in self.stages),
            metric_trace=self.metric_trace,
            **record_fields,
        )


def _grow(params: np.ndarray, new_count: int) -> np.ndarray:
    grown = np.zeros(new_count)
    grown[: params.size] = params
    return grown


def _stage_budgets(n_stages: int, cfg: TrainingConfig, spec_budgets: Optional[Sequence[int]]) -> List[int]:
    if spec_budgets is not None:
        if len(spec_budgets) != n_stages:
            raise ValueError(f"per_stage_max_iters has {len(spec_budgets)} entries, need {n_stages}")
        return [int(b) for b in spec_budgets]
    coarse = max(1, cfg.max_iters // n_stages)
    return [coarse] * (n_stages - 1) + [cfg.max_iters]


def _run_plans(
    plans: List[_StagePlan],
    cfg: TrainingConfig,
    record_fields: Dict,
    spec_budgets: Optional[Sequence[int]] = None,
) -> RunRecord:
    session = _Session(cfg)
    budgets = _stage_budgets(len(plans), cfg, spec_budgets)
    params = np.zeros(plans[0].circuit.param_count)
    if plans[0].x0_override is not None:
        params = plans[0].x0_override.copy()
    for plan, budget in zip(plans, budgets):
        if plan.circuit.param_count > params.size:
            params = _grow(params, plan.circuit.param_count)
        params = session.run_stage(plan, params, budget)
    return session.finish(record_fields, plans[-1].circuit, params)


def _record_fields(label: str, cfg: TrainingConfig, architecture: str) -> Dict:
    return {
        "strategy_label": label,
        "graph_name": cfg.graph.name if cfg.graph is not None else "",
        "architecture": architecture,
        "seed": cfg.seed,
    }


# ---------------------------------------------------------------------------
# Schedules


def train_svqe(
    circuit: Circuit, h: PauliSum, cfg: TrainingConfig,
    per_stage_max_iters: Optional[Sequence[int]] = None,
) -> RunRecord:
    """Plain VQE: zero-initialized parameters, one full-Hamiltonian stage."""
    plans = [
        _StagePlan(
            label="full",
            circuit=circuit,
            hamiltonian=simplify(h),
            trainable_slots=tuple(range(circuit.param_count)),
            threshold=cfg.fine_threshold,
        )
    ]
    return _run_plans(plans, cfg, _record_fields("SVQE", cfg, "custom"), per_stage_max_iters)


def sha_stage_plans(
    circuit: Circuit, h: PauliSum, partition: Partition, cfg: TrainingConfig
) -> List[_StagePlan]:
    validate_partition(partition, len(h.terms))
    n_blocks = partition.n_blocks
    all_slots = tuple(range(circuit.param_count))
    plans = []
    for k in range(1, n_blocks + 1):
        final = k == n_blocks
        plans.append(
            _StagePlan(
                label="full" if final else f"prefix{k}of{n_blocks}",
                circuit=circuit,
                hamiltonian=assemble_prefix(h, partition, k),
                trainable_slots=all_slots,
                threshold=cfg.fine_threshold if final else cfg.coarse_threshold,
            )
        )
    return plans


def train_sha(circuit: Circuit, h: PauliSum, partition: Partition, cfg: TrainingConfig,
              label: str = "SHA",
              per_stage_max_iters: Optional[Sequence[int]] = None) -> RunRecord:
    """Sequential assembly: optimize against growing prefix Hamiltonians.

    Stages k = 1..M-1 train on the first-k-blocks partial sum at the
    coarse threshold; the final stage trains on the full Hamiltonian at
    the fine threshold.  With M = 1 this degenerates to plain VQE.
    """
    plans = sha_stage_plans(circuit, h, partition, cfg)
    return _run_plans(plans, cfg, _record_fields(label, cfg, "custom"), per_stage_max_iters)


def _ll_depths(n_layers: int, ll: LayerwiseParams) -> List[int]:
    depths = [min(ll.start_layers, n_layers)]
    while depths[-1] < n_layers:
        depths.append(min(depths[-1] + ll.grow_step, n_layers))
    return depths


def _ll_phase1_plans(
    arch: ArchitectureId, n_qubits: int, n_layers: int, h_full: PauliSum,
    ll: LayerwiseParams, cfg: TrainingConfig,
) -> List[_StagePlan]:
    plans = []
    for depth in _ll_depths(n_layers, ll):
        circuit = build_ansatz(arch, n_qubits, depth)
        window = circuit.layers[max(0, depth - ll.train_window) :]
        trainable = tuple(s for layer in window for s in layer.param_slots)
        plans.append(
            _StagePlan(
                label=f"grow{depth}",
                circuit=circuit,
                hamiltonian=h_full,
                trainable_slots=trainable,
                threshold=cfg.coarse_threshold,
            )
        )
    return plans


def _ll_phase2_plans(
    arch: ArchitectureId, n_qubits: int, n_layers: int, h_full: PauliSum,
    ll: LayerwiseParams, cfg: TrainingConfig,
) -> List[_StagePlan]:
    circuit = build_ansatz(arch, n_qubits, n_layers)
    window = math.ceil(ll.sweep_fraction * n_layers)
    plans = []
    if window == 0:
        return plans
    starts = list(range(0, n_layers, window))
    for i, start in enumerate(starts):
        layers = circuit.layers[start : start + window]
        trainable = tuple(s for layer in layers for s in layer.param_slots)
        plans.append(
            _StagePlan(
                label=f"window{i + 1}",
                circuit=circuit,
                hamiltonian=h_full,
                trainable_slots=trainable,
                threshold=cfg.fine_threshold,
            )
        )
    return plans


def train_ll(
    arch: ArchitectureId, n_layers: int, h: PauliSum,
    ll_params: Optional[LayerwiseParams], cfg: TrainingConfig,
    per_stage_max_iters: Optional[Sequence[int]] = None,
) -> RunRecord:
    """Layerwise growth: train the freshest layers while the circuit grows,
    then sweep parameter windows over the finished circuit."""
    ll = ll_params or LayerwiseParams()
    h_full = simplify(h)
    plans = _ll_phase1_plans(arch, h.n_qubits, n_layers, h_full, ll, cfg)
    plans += _ll_phase2_plans(arch, h.n_qubits, n_layers, h_full, ll, cfg)
    return _run_plans(plans, cfg, _record_fields("LL", cfg, arch.value), per_stage_max_iters)


def _lvqe_circuits(arch: ArchitectureId, n_qubits: int, n_layers: int) -> List[Circuit]:
    circuits = [Circuit(n_qubits, (ry_layer(n_qubits),), n_qubits)]
    for depth in range(1, n_layers + 1):
        circuits.append(prepend_ry_layer(build_ansatz(arch, n_qubits, depth)))
    return circuits


def train_lvqe(arch: ArchitectureId, n_layers: int, h: PauliSum, cfg: TrainingConfig,
               per_stage_max_iters: Optional[Sequence[int]] = None) -> RunRecord:
    """Identity-preserving growth: an initial RY layer, then one zero-
    initialized layer at a time, always training every parameter."""
    if not build_ansatz(arch, h.n_qubits, 1).layers[0].identity_at_zero:
        warnings.warn(
            f"{arch.value} layers are not identity at zero; adding a layer shifts the state",
            stacklevel=2,
        )
    h_full = simplify(h)
    circuits = _lvqe_circuits(arch, h.n_qubits, n_layers)
    plans = [
        _StagePlan(
            label="ry" if depth == 0 else f"add_layer{depth}",
            circuit=circuit,
            hamiltonian=h_full,
            trainable_slots=tuple(range(circuit.param_count)),
            threshold=cfg.coarse_threshold,
        )
        for depth, circuit in enumerate(circuits)
    ]
    plans.append(
        _StagePlan(
            label="final",
            circuit=circuits[-1],
            hamiltonian=h_full,
            trainable_slots=tuple(range(circuits[-1].param_count)),
            threshold=cfg.fine_threshold,
        )
    )
    return _run_plans(plans, cfg, _record_fields("L-VQE", cfg, arch.value), per_stage_max_iters)


def train_qaoa(h: PauliSum, p: int, cfg: TrainingConfig,
               per_stage_max_iters: Optional[Sequence[int]] = None) -> RunRecord:
    """Alternating-operator baseline with the linear-schedule start."""
    circuit = build_qaoa(h, p)
    plans = [
        _StagePlan(
            label="full",
            circuit=circuit,
            hamiltonian=simplify(h),
            trainable_slots=tuple(range(circuit.param_count)),
            threshold=cfg.fine_threshold,
            x0_override=constant_speed_init(p),
        )
    ]
    return _run_plans(plans, cfg, _record_fields(f"QAOA{p}", cfg, "QAOA"), per_stage_max_iters)


def train_hybrid(
    kind: StrategyKind,
    arch: ArchitectureId,
    n_layers: int,
    h: PauliSum,
    partition: Partition,
    cfg: TrainingConfig,
    ll_params: Optional[LayerwiseParams] = None,
    label: Optional[str] = None,
    per_stage_max_iters: Optional[Sequence[int]] = None,
) -> RunRecord:
    """Layerwise outer schedule with a full assembly sweep per growth stage.

    Each stage that would train a newly grown circuit against the full
    Hamiltonian instead runs the partition prefixes 1..M at the coarse
    threshold; one final stage trains the finished circuit on the full
    Hamiltonian at the fine threshold.
    """
    if kind not in (StrategyKind.SHA_LL, StrategyKind.SHA_LVQE):
        raise ValueError(f"not a hybrid kind: {kind}")
    validate_partition(partition, len(h.terms))
    ll = ll_params or LayerwiseParams()
    n_blocks = partition.n_blocks
    prefixes = [assemble_prefix(h, partition, k) for k in range(1, n_blocks + 1)]
    h_full = simplify(h)

    if kind is StrategyKind.SHA_LVQE:
        outer = []
        for depth, circuit in enumerate(_lvqe_circuits(arch, h.n_qubits, n_layers)[1:], start=1):
            outer.append((f"add_layer{depth}", circuit, tuple(range(circuit.param_count))))
        final_circuit = outer[-1][1]
    else:
        outer = []
        for plan in _ll_phase1_plans(arch, h.n_qubits, n_layers, h_full, ll, cfg):
            outer.append((plan.label, plan.circuit, plan.trainable_slots))
        final_circuit = build_ansatz(arch, h.n_qubits, n_layers)

    plans = []
    for stage_label, circuit, trainable in outer:
        for k in range(1, n_blocks + 1):
            plans.append(
                _StagePlan(
                    label=f"{stage_label}_prefix{k}of{n_blocks}",
                    circuit=circuit,
                    hamiltonian=prefixes[k - 1],
                    trainable_slots=trainable,
                    threshold=cfg.coarse_threshold,
                )
            )
    full_plan = _StagePlan(
        label="full",
        circuit=final_circuit,
        hamiltonian=h_full,
        trainable_slots=tuple(range(final_circuit.param_count)),
        threshold=cfg.fine_threshold,
    )
    if kind is StrategyKind.SHA_LL:
        windows = _ll_phase2_plans(arch, h.n_qubits, n_layers, h_full, ll, cfg)
        if len(windows) == 1 and len(windows[0].trainable_slots) == final_circuit.param_count:
            # The single all-parameter sweep IS the final full stage.
            plans.append(full_plan)
        else:
            plans += windows
            plans.append(full_plan)
    else:
        plans.append(full_plan)
    run_label = label or ("SHA+LL" if kind is StrategyKind.SHA_LL else "SHA+LVQE")
    return _run_plans(plans, cfg, _record_fields(run_label, cfg, arch.value), per_stage_max_iters)


def train(
    spec: StrategySpec,
    graph: GraphInstance,
    h: PauliSum,
    arch: Optional[ArchitectureId],
    n_layers: int,
    cfg: TrainingConfig,
) -> RunRecord:
    """Dispatch a strategy spec against one problem instance.

    ``h`` must be the canonical per-edge expansion of the instance's cost
    Hamiltonian (assembly partitions index into it).
    """
    if cfg.graph is None:
        cfg = dataclasses.replace(cfg, graph=graph)
    if spec.kind is StrategyKind.QAOA:
        return train_qaoa(h, spec.qaoa_p, cfg, spec.per_stage_max_iters)
    if arch is None:
        raise ValueError(f"{spec.kind.value} needs a circuit architecture")
    if spec.kind is StrategyKind.SVQE:
        circuit = build_ansatz(arch, h.n_qubits, n_layers)
        record = train_svqe(circuit, h, cfg, spec.per_stage_max_iters)
        record.architecture = arch.value
        return record
    if spec.kind is StrategyKind.LL:
        return train_ll(arch, n_layers, h, spec.ll_params, cfg, spec.per_stage_max_iters)
    if spec.kind is StrategyKind.LVQE:
        return train_lvqe(arch, n_layers, h, cfg, spec.per_stage_max_iters)
    partition = build_partition(spec.partition_strategy, spec.n_partitions, graph, h, cfg.seed)
    if spec.kind is StrategyKind.SHA:
        circuit = build_ansatz(arch, h.n_qubits, n_layers)
        record = train_sha(circuit, h, partition, cfg, label=spec.label,
                           per_stage_max_iters=spec.per_stage_max_iters)
        record.architecture = arch.value
        return record
    return train_hybrid(spec.kind, arch, n_layers, h, partition, cfg,
                        ll_params=spec.ll_params, label=spec.label,
                        per_stage_max_iters=spec.per_stage_max_iters)

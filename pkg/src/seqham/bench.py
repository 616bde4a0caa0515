"""Experiment matrix runner: metrics, persistence, aggregation, plots.

Every (instance x architecture x strategy x seed) cell trains in
isolation and writes one line-delimited JSON record file ending in a
checksum line.  Reruns skip cells whose record validates, so a matrix is
resumable; the aggregate CSV is rewritten from the records and is
byte-identical across reruns of the same configuration.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import ceil
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .ansatz import ArchitectureId
from .pauli import derive_seed
from .problems import GraphInstance, coloring_hamiltonian, is_proper, proper_mask
from .simulator import ShotHistogram, Statevector, run_circuit, sample_indices, shot_rng
from .strategies import RunRecord, StrategySpec, TrainingConfig, train

RECORD_SCHEMA = 1
AGGREGATE_SCHEMA = 1
OUTPUT_ROOT_ENV = "SEQHAM_OUTPUT_ROOT"


def accuracy(source: Union[Statevector, ShotHistogram], graph: GraphInstance) -> float:
    """Probability mass (state) or shot fraction (histogram) on proper colorings."""
    if isinstance(source, Statevector):
        if source.n_qubits != graph.n_qubits:
            raise ValueError(f"state has {source.n_qubits} qubits, instance needs {graph.n_qubits}")
        probs = np.abs(source.amplitudes) ** 2
        return float(probs @ proper_mask(graph))
    proper = 0
    for bits, count in source.counts.items():
        if len(bits) != graph.n_qubits:
            raise ValueError(f"bitstring length {len(bits)} != {graph.n_qubits} qubits")
        if is_proper(graph, bits):
            proper += count
    return proper / source.total_shots


def trailing_window(n_iterations: int, trailing_fraction: float) -> int:
    if not 0.0 < trailing_fraction <= 1.0:
        raise ValueError("trailing_fraction must lie in (0, 1]")
    return ceil(trailing_fraction * n_iterations)


def most_likely_accuracy(
    trace: Sequence[ShotHistogram], graph: GraphInstance, trailing_fraction: float = 0.02
) -> float:
    """Fraction of trailing iterations whose modal bitstring is proper.

    The window covers the last ``ceil(trailing_fraction * len(trace))``
    iterations; modal ties break to the lowest bitstring value.
    """
    if not trace:
        raise ValueError("empty iteration trace")
    window = trailing_window(len(trace), trailing_fraction)
    flags = [is_proper(graph, histogram.modal_bitstring()) for histogram in trace[-window:]]
    return sum(flags) / len(flags)


def trailing_flag_mean(flags: Sequence[bool], trailing_fraction: float = 0.02) -> float:
    """Same trailing-window rule applied to precomputed modal-proper flags."""
    if not flags:
        raise ValueError("empty iteration trace")
    window = trailing_window(len(flags), trailing_fraction)
    tail = flags[-window:]
    return sum(tail) / len(tail)


@dataclass(frozen=True)
class MetricRow:
    graph_name: str
    architecture: str
    strategy: str
    seed: int
    final_accuracy: float
    most_likely_accuracy: float
    total_iterations: int

    def key(self) -> Tuple:
        return (self.strategy, self.graph_name, self.architecture, self.seed)


@dataclass
class ExperimentConfig:
    """The experiment matrix: instances x architectures x strategies x seeds."""

    instances: List[GraphInstance]
    architectures: List[ArchitectureId]
    strategies: List[StrategySpec]
    seeds: List[int]
    shots: Optional[int] = 200
    n_layers: int = 3
    max_iters: int = 4000
    trailing_fraction: float = 0.02
    shot_metrics: bool = False
    output_dir: Path = Path("out")
    parallel: int = 1

    def __post_init__(self):
        if not (self.instances and self.architectures and self.strategies and self.seeds):
            raise ValueError("every matrix dimension must be non-empty")
        self.output_dir = Path(self.output_dir)

    def cells(self) -> List["CellSpec"]:
        return [
            CellSpec(graph, arch, strategy, seed, self.shots, self.n_layers,
                     self.max_iters, self.trailing_fraction, self.shot_metrics)
            for graph in self.instances
            for arch in self.architectures
            for strategy in self.strategies
            for seed in self.seeds
        ]


@dataclass(frozen=True)
class CellSpec:
    graph: GraphInstance
    architecture: ArchitectureId
    strategy: StrategySpec
    seed: int
    shots: Optional[int]
    n_layers: int
    max_iters: int
    trailing_fraction: float
    shot_metrics: bool

    @property
    def run_id(self) -> str:
        return f"{self.graph.name}__{self.architecture.value}__{self.strategy.label}__seed{self.seed}"


def final_state_accuracy(record: RunRecord, graph: GraphInstance, shots: Optional[int] = None) -> float:
    """Accuracy of the trained state: exact readout, or shot-based if asked."""
    state = run_circuit(record.final_circuit, record.final_params)
    if shots is None:
        return accuracy(state, graph)
    indices = sample_indices(state, shots, shot_rng(derive_seed(record.seed, 0xF1A7)))
    return float(proper_mask(graph)[indices].mean())


def run_cell(cell: CellSpec) -> tuple[MetricRow, RunRecord]:
    """Train one matrix cell and compute its metric row."""
    cfg = TrainingConfig(
        max_iters=cell.max_iters,
        shots=cell.shots,
        seed=cell.seed,
        graph=cell.graph,
        shot_metrics=cell.shot_metrics,
    )
    h = coloring_hamiltonian(cell.graph)
    record = train(cell.strategy, cell.graph, h, cell.architecture, cell.n_layers, cfg)
    flags = [flag for _, flag in record.metric_trace]
    row = MetricRow(
        graph_name=cell.graph.name,
        architecture=record.architecture,
        strategy=record.strategy_label,
        seed=cell.seed,
        final_accuracy=final_state_accuracy(
            record, cell.graph, cell.shots if cell.shot_metrics else None
        ),
        most_likely_accuracy=trailing_flag_mean(flags, cell.trailing_fraction),
        total_iterations=record.total_iterations,
    )
    return row, record


# ---------------------------------------------------------------------------
# Persistence


def _record_lines(row: MetricRow, record: RunRecord, cell: CellSpec) -> List[str]:
    lines = [
        json.dumps(
            {
                "type": "meta",
                "schema": RECORD_SCHEMA,
                "run_id": cell.run_id,
                "graph": row.graph_name,
                "architecture": row.architecture,
                "strategy": row.strategy,
                "seed": row.seed,
                "shots": cell.shots,
                "n_layers": cell.n_layers,
                "max_iters": cell.max_iters,
            },
            sort_keys=True,
        )
    ]
    for stage in record.stages:
        lines.append(
            json.dumps(
                {
                    "type": "stage",
                    "label": stage.label,
                    "hamiltonian_terms": len(stage.hamiltonian.terms),
                    "trainable_slots": list(stage.trainable_slots),
                    "iterations": stage.result.iterations_used,
                    "best_value": stage.result.best_value,
                    "trajectory": [v for _, v in stage.result.trajectory],
                },
                sort_keys=True,
            )
        )
    lines.append(
        json.dumps(
            {
                "type": "metrics",
                "final_accuracy": row.final_accuracy,
                "most_likely_accuracy": row.most_likely_accuracy,
                "total_iterations": row.total_iterations,
                "final_params": [float(p) for p in record.final_params],
                "accuracy_trace": [a for a, _ in record.metric_trace],
                "modal_proper_trace": [int(f) for _, f in record.metric_trace],
            },
            sort_keys=True,
        )
    )
    return lines


def write_record(path: Path, row: MetricRow, record: RunRecord, cell: CellSpec) -> None:
    lines = _record_lines(row, record, cell)
    digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
    lines.append(json.dumps({"type": "checksum", "sha256": digest}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_record_row(path: Path) -> Optional[MetricRow]:
    """Re-read a record file; returns None unless the checksum validates."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
        if len(lines) < 3:
            return None
        tail = json.loads(lines[-1])
        if tail.get("type") != "checksum":
            return None
        digest = hashlib.sha256("\n".join(lines[:-1]).encode("utf-8")).hexdigest()
        if digest != tail.get("sha256"):
            return None
        meta = json.loads(lines[0])
        metrics = json.loads(lines[-2])
        return MetricRow(
            graph_name=meta["graph"],
            architecture=meta["architecture"],
            strategy=meta["strategy"],
            seed=meta["seed"],
            final_accuracy=metrics["final_accuracy"],
            most_likely_accuracy=metrics["most_likely_accuracy"],
            total_iterations=metrics["total_iterations"],
        )
    except (json.JSONDecodeError, KeyError, OSError):
        return None


def _execute_cell(args: tuple[CellSpec, str]) -> tuple[str, Optional[MetricRow], Optional[str]]:
    cell, record_path = args
    try:
        row, record = run_cell(cell)
        write_record(Path(record_path), row, record, cell)
        return cell.run_id, row, None
    except Exception as exc:  # cell isolation: failures must not kill the matrix
        return cell.run_id, None, f"{type(exc).__name__}: {exc}"


@dataclass
class MatrixResult:
    rows: List[MetricRow]
    failures: Dict[str, str]
    aggregate_path: Path


def resolve_output_dir(output_dir: Path) -> Path:
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not Path(output_dir).is_absolute():
        return Path(root) / output_dir
    return Path(output_dir)


def run_matrix(cfg: ExperimentConfig, resume: bool = False, progress: bool = False) -> MatrixResult:
    """Execute every matrix cell, write records and the aggregate CSV.

    With ``resume=True``, cells whose record file exists and passes its
    checksum are loaded instead of re-trained; corrupt records re-run.
    Cell failures are collected, not raised.
    """
    out_dir = resolve_output_dir(cfg.output_dir)
    records_dir = out_dir / "records"
    records_dir.mkdir(parents=True, exist_ok=True)

    pending: List[tuple[CellSpec, str]] = []
    rows: List[MetricRow] = []
    for cell in cfg.cells():
        record_path = records_dir / f"{cell.run_id}.jsonl"
        if resume and record_path.exists():
            row = load_record_row(record_path)
            if row is not None:
                rows.append(row)
                continue
        pending.append((cell, str(record_path)))

    failures: Dict[str, str] = {}
    if cfg.parallel > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            outcomes = list(pool.map(_execute_cell, pending))
    else:
        outcomes = [_execute_cell(item) for item in pending]
    for run_id, row, error in outcomes:
        if row is not None:
            rows.append(row)
            if progress:
                print(f"done {run_id}: accuracy={row.final_accuracy:.4f}", file=sys.stderr)
        else:
            failures[run_id] = error
            if progress:
                print(f"FAIL {run_id}: {error}", file=sys.stderr)

    rows.sort(key=MetricRow.key)
    aggregate_path = out_dir / "aggregate.csv"
    write_rows_csv(out_dir / "rows.csv", rows)
    write_aggregate_csv(aggregate_path, aggregate(rows))
    return MatrixResult(rows=rows, failures=failures, aggregate_path=aggregate_path)


# ---------------------------------------------------------------------------
# Aggregation


@dataclass(frozen=True)
class StrategySummary:
    strategy: str
    n_runs: int
    mean_accuracy: float
    median_accuracy: float
    q1_accuracy: float
    q3_accuracy: float
    mean_most_likely: float
    median_most_likely: float
    mean_iterations: float


def aggregate(rows: Sequence[MetricRow]) -> List[StrategySummary]:
    """Per-strategy statistics over all graphs, architectures and seeds."""
    if not rows:
        raise ValueError("no rows to aggregate")
    by_strategy: Dict[str, List[MetricRow]] = {}
    for row in rows:
        by_strategy.setdefault(row.strategy, []).append(row)
    summaries = []
    for strategy in sorted(by_strategy):
        group = by_strategy[strategy]
        acc = np.array([r.final_accuracy for r in group])
        ml = np.array([r.most_likely_accuracy for r in group])
        iters = np.array([r.total_iterations for r in group], dtype=float)
        summaries.append(
            StrategySummary(
                strategy=strategy,
                n_runs=len(group),
                mean_accuracy=float(acc.mean()),
                median_accuracy=float(np.median(acc)),
                q1_accuracy=float(np.quantile(acc, 0.25)),
                q3_accuracy=float(np.quantile(acc, 0.75)),
                mean_most_likely=float(ml.mean()),
                median_most_likely=float(np.median(ml)),
                mean_iterations=float(iters.mean()),
            )
        )
    return summaries


def improvement_table(summaries: Sequence[StrategySummary], baseline: str = "SVQE") -> List[Tuple[str, float]]:
    """Mean-accuracy improvement over the baseline, in percentage points."""
    reference = {s.strategy: s.mean_accuracy for s in summaries}.get(baseline)
    if reference is None:
        raise ValueError(f"baseline strategy {baseline!r} not present")
    return [
        (s.strategy, 100.0 * (s.mean_accuracy - reference))
        for s in summaries
        if s.strategy != baseline
    ]


def _csv_value(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def write_rows_csv(path: Path, rows: Sequence[MetricRow]) -> None:
    header = "graph,architecture,strategy,seed,final_accuracy,most_likely_accuracy,total_iterations"
    lines = [f"# schema={AGGREGATE_SCHEMA}", header]
    for r in sorted(rows, key=MetricRow.key):
        lines.append(
            ",".join(
                [
                    r.graph_name,
                    r.architecture,
                    r.strategy,
                    str(r.seed),
                    _csv_value(r.final_accuracy),
                    _csv_value(r.most_likely_accuracy),
                    str(r.total_iterations),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_aggregate_csv(path: Path, summaries: Sequence[StrategySummary]) -> None:
    header = (
        "strategy,n_runs,mean_accuracy,median_accuracy,q1_accuracy,q3_accuracy,"
        "mean_most_likely,median_most_likely,mean_iterations"
    )
    lines = [f"# schema={AGGREGATE_SCHEMA}", header]
    for s in summaries:
        lines.append(
            ",".join(
                [
                    s.strategy,
                    str(s.n_runs),
                    _csv_value(s.mean_accuracy),
                    _csv_value(s.median_accuracy),
                    _csv_value(s.q1_accuracy),
                    _csv_value(s.q3_accuracy),
                    _csv_value(s.mean_most_likely),
                    _csv_value(s.median_most_likely),
                    _csv_value(s.mean_iterations),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_rows_csv(path: Path) -> List[MetricRow]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#") or line.startswith("graph,"):
            continue
        graph, arch, strategy, seed, acc, ml, iters = line.split(",")
        rows.append(
            MetricRow(graph, arch, strategy, int(seed), float(acc), float(ml), int(iters))
        )
    return rows


# ---------------------------------------------------------------------------
# Plots

PLOT_KINDS = ("accuracy_box", "most_likely_box", "iterations_bar")


def plot(rows: Sequence[MetricRow], kind: str, out_dir: Path) -> Path:
    """Render one summary figure from metric rows; returns the file path.

    Uses the Agg backend with fixed metadata so reruns produce identical
    bytes.
    """
    if not rows:
        raise ValueError("no rows to plot")
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_strategy: Dict[str, List[MetricRow]] = {}
    for row in rows:
        by_strategy.setdefault(row.strategy, []).append(row)
    strategies = sorted(by_strategy)

    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(strategies)), 4))
    if kind == "accuracy_box":
        ax.boxplot([[r.final_accuracy for r in by_strategy[s]] for s in strategies],
                   tick_labels=strategies)
        ax.set_ylabel("accuracy (proper-coloring probability)")
    elif kind == "most_likely_box":
        ax.boxplot([[r.most_likely_accuracy for r in by_strategy[s]] for s in strategies],
                   tick_labels=strategies)
        ax.set_ylabel("most-likely-shot accuracy (trailing window)")
    else:
        means = [float(np.mean([r.total_iterations for r in by_strategy[s]])) for s in strategies]
        ax.bar(range(len(strategies)), means)
        ax.set_xticks(range(len(strategies)))
        ax.set_xticklabels(strategies)
        ax.set_ylabel("mean optimization iterations")
    ax.set_xlabel("strategy")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{kind}.png"
    fig.savefig(path, dpi=120, metadata={"Software": "seqham"})
    plt.close(fig)
    return path

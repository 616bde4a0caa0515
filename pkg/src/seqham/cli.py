"""Command-line interface.

Subcommands:
  generate             write graph fixture files (single spec or a bundled suite)
  export-hamiltonian   write the cost Hamiltonian of a fixture as text
  run                  execute an experiment matrix from a config file
  report               print per-strategy statistics and improvements
  plot                 render summary figures from a finished run

Exit codes: 0 success, 1 configuration error, 2 partial cell failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .ansatz import ArchitectureId
from .bench import (
    ExperimentConfig,
    PLOT_KINDS,
    aggregate,
    improvement_table,
    plot,
    read_rows_csv,
    resolve_output_dir,
    run_matrix,
)
from .pauli import serialize_pauli_sum, simplify
from .problems import (
    build_suite,
    coloring_hamiltonian,
    find_connected_instance,
    generate_graph,
    is_connected,
    load_bundled,
    read_instance,
    with_solution_stats,
    write_instance,
)
from .strategies import parse_strategy_spec


class ConfigError(Exception):
    pass


def _parse_config_file(path: Path) -> ExperimentConfig:
    """Parse the key=value experiment config format (see README)."""
    values: dict[str, str] = {}
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got: {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()

    def split_list(key: str) -> list[str]:
        if key not in values:
            raise ConfigError(f"missing config key {key!r}")
        return [item.strip() for item in values[key].split(",") if item.strip()]

    instances = []
    for token in split_list("instances"):
        if token.startswith("gen:"):
            spec = dict(part.split("=", 1) for part in token[4:].split(";"))
            instances.append(
                find_connected_instance(
                    int(spec["n"]), float(spec["p"]), int(spec.get("k", 4)),
                    int(spec["seed"]), name=spec.get("name", ""),
                )
            )
        elif token.startswith("bundled:"):
            instances.append(load_bundled(token[len("bundled:"):]))
        else:
            fixture = Path(token)
            if not fixture.exists():
                raise ConfigError(f"fixture file not found: {fixture}")
            instances.append(read_instance(fixture))

    try:
        architectures = [ArchitectureId(a.upper()) for a in split_list("architectures")]
        strategies = [
            parse_strategy_spec(s.strip())
            for s in values.get("strategies", "").split(";")
            if s.strip()
        ]
        if not strategies:
            raise ConfigError("missing config key 'strategies'")
        seeds = [int(s) for s in split_list("seeds")]
        shots_raw = values.get("shots", "200")
        return ExperimentConfig(
            instances=instances,
            architectures=architectures,
            strategies=strategies,
            seeds=seeds,
            shots=None if shots_raw.lower() in ("none", "exact") else int(shots_raw),
            n_layers=int(values.get("n_layers", "3")),
            max_iters=int(values.get("max_iters", "4000")),
            trailing_fraction=float(values.get("trailing_fraction", "0.02")),
            shot_metrics=values.get("shot_metrics", "false").lower() == "true",
            output_dir=Path(values.get("output_dir", "out")),
            parallel=int(values.get("parallel", "1")),
        )
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_generate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.suite:
        for graph in build_suite(args.suite):
            write_instance(graph, out_dir / f"{graph.name}.txt")
            print(f"wrote {out_dir / (graph.name + '.txt')} "
                  f"(edges={len(graph.edges)}, solutions={graph.solution_count})")
        return 0
    if args.n is None or args.p is None or args.seed is None:
        print("generate: need --suite or all of --n/--p/--seed", file=sys.stderr)
        return 1
    graph = generate_graph(args.n, args.p, args.seed, args.colors)
    if args.require_connected and not is_connected(graph):
        print(f"graph n={args.n} p={args.p} seed={args.seed} is not connected", file=sys.stderr)
        return 1
    graph = with_solution_stats(graph)
    path = out_dir / f"{graph.name}.txt"
    write_instance(graph, path)
    print(f"wrote {path} (edges={len(graph.edges)}, solutions={graph.solution_count})")
    return 0


def _cmd_export_hamiltonian(args) -> int:
    graph = load_bundled(args.fixture) if args.bundled else read_instance(Path(args.fixture))
    h = coloring_hamiltonian(graph)
    if args.simplified:
        h = simplify(h)
    text = serialize_pauli_sum(h)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({len(h.terms)} terms)")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_run(args) -> int:
    try:
        cfg = _parse_config_file(Path(args.config))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.parallel is not None:
        cfg.parallel = args.parallel
    result = run_matrix(cfg, resume=args.resume, progress=True)
    print(f"{len(result.rows)} runs complete; aggregate at {result.aggregate_path}")
    if result.failures:
        for run_id, error in sorted(result.failures.items()):
            print(f"failed cell {run_id}: {error}", file=sys.stderr)
        return 2
    return 0


def _cmd_report(args) -> int:
    rows_path = resolve_output_dir(Path(args.output_dir)) / "rows.csv"
    if not rows_path.exists():
        print(f"no rows.csv under {rows_path.parent}; run the matrix first", file=sys.stderr)
        return 1
    rows = read_rows_csv(rows_path)
    summaries = aggregate(rows)
    header = f"{'strategy':<16}{'runs':>6}{'mean acc':>12}{'median':>10}{'mean ML':>10}{'iters':>10}"
    print(header)
    print("-" * len(header))
    for s in summaries:
        print(
            f"{s.strategy:<16}{s.n_runs:>6}{s.mean_accuracy:>12.4f}"
            f"{s.median_accuracy:>10.4f}{s.mean_most_likely:>10.4f}{s.mean_iterations:>10.1f}"
        )
    if any(s.strategy == args.baseline for s in summaries):
        print(f"\nimprovement vs {args.baseline} (accuracy percentage points):")
        for strategy, delta in improvement_table(summaries, args.baseline):
            print(f"  {strategy:<16}{delta:+8.2f}")
    return 0


def _cmd_plot(args) -> int:
    rows_path = resolve_output_dir(Path(args.output_dir)) / "rows.csv"
    if not rows_path.exists():
        print(f"no rows.csv under {rows_path.parent}; run the matrix first", file=sys.stderr)
        return 1
    rows = read_rows_csv(rows_path)
    kinds = PLOT_KINDS if args.kind == "all" else (args.kind,)
    for kind in kinds:
        path = plot(rows, kind, resolve_output_dir(Path(args.output_dir)) / "plots")
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqham",
        description="Hamiltonian-assembly training schedules for variational circuits",
    )
    parser.add_argument("--version", action="version", version=f"seqham {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write graph fixture files")
    gen.add_argument("--suite", choices=("standard", "desk"), help="regenerate a bundled suite")
    gen.add_argument("--n", type=int, help="node count")
    gen.add_argument("--p", type=float, help="edge probability")
    gen.add_argument("--seed", type=int, help="generator seed")
    gen.add_argument("--colors", type=int, default=4, help="color count (power of two)")
    gen.add_argument("--require-connected", action="store_true")
    gen.add_argument("--out", default="fixtures", help="output directory")
    gen.set_defaults(func=_cmd_generate)

    exp = sub.add_parser("export-hamiltonian", help="write a fixture's cost Hamiltonian")
    exp.add_argument("fixture", help="fixture file path (or bundled name with --bundled)")
    exp.add_argument("--bundled", action="store_true", help="load a bundled fixture by name")
    exp.add_argument("--simplified", action="store_true", help="merge like terms first")
    exp.add_argument("--out", help="output file (default stdout)")
    exp.set_defaults(func=_cmd_export_hamiltonian)

    run = sub.add_parser("run", help="execute an experiment matrix")
    run.add_argument("config", help="config file path")
    run.add_argument("--parallel", type=int, default=None, help="worker processes")
    run.add_argument("--resume", action="store_true", help="skip cells with valid records")
    run.set_defaults(func=_cmd_run)

    rep = sub.add_parser("report", help="aggregate table and improvements")
    rep.add_argument("output_dir", help="matrix output directory")
    rep.add_argument("--baseline", default="SVQE")
    rep.set_defaults(func=_cmd_report)

    plt_cmd = sub.add_parser("plot", help="render summary figures")
    plt_cmd.add_argument("output_dir", help="matrix output directory")
    plt_cmd.add_argument("--kind", default="all", choices=PLOT_KINDS + ("all",))
    plt_cmd.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Graph-coloring instances, their cost Hamiltonians, and brute-force oracles.

Color packing convention (shared with :mod:`seqham.simulator`): node ``v``
owns qubits ``v*m .. v*m + m - 1`` where ``k = 2**m`` is the color count,
and its color value is ``sum(bit[v*m + l] << l)``.  With the little-endian
amplitude layout this means the color of node ``v`` in basis state ``b``
is ``(b >> (v*m)) & (k - 1)``.

The cost Hamiltonian expands, per edge ``(v, w)``, to the ``k`` terms of
``2**m * prod_l (1 + Z_{v,l} Z_{w,l})``, enumerated by a binary counter
over the included ``Z Z`` factors (identity first).  Its diagonal value on
any basis state is ``4**m`` times the number of monochromatic edges, so
proper colorings sit exactly at energy zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .pauli import PauliSum, PauliTerm
from .simulator import shot_rng

BRUTE_FORCE_CAP = 1 << 26


class EncodingError(ValueError):
    """Raised when an instance cannot be encoded (e.g. k not a power of two)."""


@dataclass(frozen=True)
class GraphInstance:
    """A colored-graph problem: nodes, edges, color count and hardness stats."""

    name: str
    n_nodes: int
    edges: Tuple[Tuple[int, int], ...]
    k_colors: int
    seed: int
    p_edge: float
    solution_count: Optional[int] = None
    solution_ratio: Optional[float] = None

    def __post_init__(self):
        if self.k_colors < 2 or self.k_colors & (self.k_colors - 1):
            raise EncodingError(f"k_colors={self.k_colors} is not a power of two >= 2")
        normalized = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        object.__setattr__(self, "edges", normalized)
        for u, v in self.edges:
            if u == v or not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"invalid edge ({u}, {v}) for {self.n_nodes} nodes")

    @property
    def m_bits(self) -> int:
        return self.k_colors.bit_length() - 1

    @property
    def n_qubits(self) -> int:
        return self.n_nodes * self.m_bits

    @property
    def search_space(self) -> int:
        return self.k_colors ** self.n_nodes


def generate_graph(n: int, p: float, seed: int, k_colors: int = 4, name: str = "") -> GraphInstance:
    """Draw each unordered node pair independently with probability ``p``.

    Deterministic per seed (Philox); connectivity is not guaranteed, the
    caller filters.  Hardness stats are left unset until brute-forced.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = shot_rng(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v))
    return GraphInstance(
        name=name or f"n{n}_p{p}_s{seed}",
        n_nodes=n,
        edges=tuple(edges),
        k_colors=k_colors,
        seed=seed,
        p_edge=p,
    )


def neighbors(graph: GraphInstance) -> Dict[int, List[int]]:
    adjacency: Dict[int, List[int]] = {v: [] for v in range(graph.n_nodes)}
    for u, v in graph.edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    return {v: sorted(ns) for v, ns in adjacency.items()}


def is_connected(graph: GraphInstance) -> bool:
    """Reachability of every node from node 0."""
    adjacency = neighbors(graph)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == graph.n_nodes


def bfs_node_order(graph: GraphInstance) -> List[int]:
    """Deterministic breadth-first node order from node 0, neighbors ascending.

    Nodes unreachable from 0 are appended in ascending order (connected
    instances never hit that branch).
    """
    adjacency = neighbors(graph)
    order = [0]
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
    order.extend(v for v in range(graph.n_nodes) if v not in seen)
    return order


def coloring_hamiltonian(graph: GraphInstance) -> PauliSum:
    """Cost Hamiltonian penalizing monochromatic edges (see module docstring).

    The term list is the canonical per-edge expansion: for each edge in
    sorted order, ``k`` terms indexed by the binary-counter choice of
    ``Z Z`` factors, each with coefficient ``2**m``.  Partition builders
    index into exactly this order.
    """
    m = graph.m_bits
    coeff = float(1 << m)
    terms = []
    for v, w in graph.edges:
        for selector in range(1 << m):
            ops = {}
            for l in range(m):
                if (selector >> l) & 1:
                    ops[v * m + l] = "Z"
                    ops[w * m + l] = "Z"
            terms.append(PauliTerm(coeff, ops))
    return PauliSum(terms, graph.n_qubits)


def terms_per_edge(graph: GraphInstance) -> int:
    """Number of canonical expansion terms contributed by each edge."""
    return graph.k_colors


def decode_colors(graph: GraphInstance, bits: str) -> List[int]:
    """Bitstring (char i = qubit i) -> per-node color values."""
    m = graph.m_bits
    if len(bits) != graph.n_qubits:
        raise ValueError(f"bitstring length {len(bits)} != {graph.n_qubits} qubits")
    colors = []
    for v in range(graph.n_nodes):
        value = 0
        for l in range(m):
            if bits[v * m + l] == "1":
                value |= 1 << l
        colors.append(value)
    return colors


def encode_colors(graph: GraphInstance, colors: Sequence[int]) -> str:
    """Per-node color values -> bitstring under the shared convention."""
    if len(colors) != graph.n_nodes:
        raise ValueError("one color per node required")
    m = graph.m_bits
    chars = []
    for c in colors:
        if not 0 <= c < graph.k_colors:
            raise ValueError(f"color {c} outside [0, {graph.k_colors})")
        chars.extend("1" if (c >> l) & 1 else "0" for l in range(m))
    return "".join(chars)


def is_proper(graph: GraphInstance, bits: str) -> bool:
    """True iff no edge connects equally colored nodes."""
    colors = decode_colors(graph, bits)
    return all(colors[u] != colors[v] for u, v in graph.edges)


def proper_mask(graph: GraphInstance) -> np.ndarray:
    """Boolean vector over all basis states marking proper colorings."""
    if graph.search_space > BRUTE_FORCE_CAP:
        raise ValueError(
            f"search space {graph.search_space} exceeds brute-force cap {BRUTE_FORCE_CAP}"
        )
    m = graph.m_bits
    index = np.arange(graph.search_space, dtype=np.int64)
    mask = np.ones(graph.search_space, dtype=bool)
    color_cache: Dict[int, np.ndarray] = {}
    for u, v in graph.edges:
        for node in (u, v):
            if node not in color_cache:
                color_cache[node] = (index >> (node * m)) & (graph.k_colors - 1)
        mask &= color_cache[u] != color_cache[v]
    return mask


def count_proper_colorings(graph: GraphInstance) -> int:
    """Exhaustive count of assignments with no monochromatic edge."""
    return int(proper_mask(graph).sum())


def with_solution_stats(graph: GraphInstance) -> GraphInstance:
    """Return a copy with brute-forced solution count and ratio filled in."""
    count = count_proper_colorings(graph)
    return replace(graph, solution_count=count, solution_ratio=count / graph.search_space)


def find_connected_instance(
    n: int,
    p: float,
    k_colors: int,
    start_seed: int,
    max_tries: int = 10_000,
    name: str = "",
    require_satisfiable: bool = False,
) -> GraphInstance:
    """First seed >= start_seed yielding a connected graph, stats included.

    ``require_satisfiable`` additionally demands at least one proper
    coloring, which benchmark fixtures need (an unsatisfiable instance
    pins accuracy to zero for every strategy).
    """
    for seed in range(start_seed, start_seed + max_tries):
        candidate = generate_graph(n, p, seed, k_colors, name=name)
        if not is_connected(candidate):
            continue
        candidate = with_solution_stats(candidate)
        if require_satisfiable and candidate.solution_count == 0:
            continue
        return candidate
    raise RuntimeError(f"no suitable graph found in {max_tries} seeds from {start_seed}")


def write_instance(graph: GraphInstance, path: str | Path) -> None:
    """Write the plain-text fixture format (see README)."""
    lines = [f"nodes={graph.n_nodes} colors={graph.k_colors} p={graph.p_edge!r} seed={graph.seed}"]
    lines.extend(f"edge {u} {v}" for u, v in graph.edges)
    if graph.solution_count is not None:
        lines.append(f"solutions={graph.solution_count} ratio={graph.solution_ratio!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_instance(path: str | Path, name: str = "") -> GraphInstance:
    """Parse a fixture file; validates the stored solution ratio if present."""
    path = Path(path)
    header: Dict[str, str] = {}
    edges: List[Tuple[int, int]] = []
    stats: Dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("edge "):
            _, u, v = line.split()
            edges.append((int(u), int(v)))
        else:
            for token in line.split():
                key, value = token.split("=", 1)
                (stats if key in ("solutions", "ratio") else header)[key] = value
    graph = GraphInstance(
        name=name or path.stem,
        n_nodes=int(header["nodes"]),
        edges=tuple(edges),
        k_colors=int(header["colors"]),
        seed=int(header["seed"]),
        p_edge=float(header["p"]),
        solution_count=int(stats["solutions"]) if "solutions" in stats else None,
        solution_ratio=float(stats["ratio"]) if "ratio" in stats else None,
    )
    if graph.solution_count is not None:
        expected = graph.solution_count / graph.search_space
        if graph.solution_ratio != expected:
            raise ValueError(
                f"{path}: stored ratio {graph.solution_ratio} != solutions/search_space {expected}"
            )
    return graph


# Bundled instance suites.  The standard suite spans edge densities 0.30
# to 0.90 on 8 nodes / 4 colors (16 qubits); the desk suite holds five
# small 4-node / 4-color instances (8 qubits) sized for fast end-to-end
# benchmark runs.  Regenerate with ``seqham generate --suite <name>``.
STANDARD_SUITE_SPECS = [
    ("g01", 8, 0.30, 7),
    ("g02", 8, 0.55, 8),
    ("g03", 8, 0.40, 9),
    ("g04", 8, 0.40, 10),
    ("g05", 8, 0.35, 11),
    ("g06", 8, 0.30, 12),
    ("g07", 8, 0.35, 13),
    ("g08", 8, 0.50, 14),
    ("g09", 8, 0.90, 15),
    ("g10", 8, 0.40, 16),
]

DESK_SUITE_SPECS = [
    ("d1", 4, 0.50, 1),
    ("d2", 4, 0.70, 2),
    ("d3", 4, 0.90, 3),
    ("d4", 4, 0.60, 4),
    ("d5", 4, 1.00, 5),
]


def build_suite(suite: str) -> List[GraphInstance]:
    """Regenerate a bundled suite deterministically (connected, stats filled)."""
    specs = {"standard": STANDARD_SUITE_SPECS, "desk": DESK_SUITE_SPECS}.get(suite)
    if specs is None:
        raise ValueError(f"unknown suite {suite!r} (expected 'standard' or 'desk')")
    return [
        find_connected_instance(n, p, 4, seed, name=name, require_satisfiable=True)
        for name, n, p, seed in specs
    ]


def bundled_fixture_names() -> List[str]:
    root = resources.files("seqham.fixtures")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".txt"))


def load_bundled(fixture_name: str) -> GraphInstance:
    """Load one of the fixture files shipped with the package."""
    if not fixture_name.endswith(".txt"):
        fixture_name += ".txt"
    ref = resources.files("seqham.fixtures").joinpath(fixture_name)
    with resources.as_file(ref) as path:
        return read_instance(path, name=Path(fixture_name).stem)


def load_suite(suite: str) -> List[GraphInstance]:
    prefix = {"standard": "g", "desk": "d"}[suite]
    return [load_bundled(name) for name in bundled_fixture_names() if name.startswith(prefix)]

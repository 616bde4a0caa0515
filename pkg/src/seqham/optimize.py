"""Derivative-free minimization and parameter-shift gradients.

Training uses a linear-approximation trust-region method (COBYLA, via
scipy): it maintains a simplex of dim+1 points, builds a linear model,
steps within a shrinking trust radius, and stops when the radius falls
below ``progress_threshold`` or the evaluation budget ``max_iters`` is
exhausted.  One objective evaluation counts as one iteration.  The
coarse/fine threshold pair (0.8 and 1e-6) realizes the two-level scheme
the training schedules rely on: subset stages stop early with large
steps, the final full stage polishes.

The parameter-shift gradient is exact for slots driving a single
one-qubit rotation (generator eigenvalues +/-1/2 under the package's
``exp(-i*theta/2 * P)`` convention) and exists for verification; the
benchmark schedules train derivative-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .ansatz import Circuit
from .pauli import PauliSum, derive_seed, expectation_exact, expectation_shots
from .simulator import GateKind, Statevector, run_circuit, sample_indices, shot_rng

SHIFT_COMPATIBLE_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})


@dataclass(frozen=True)
class OptimConfig:
    """Budget and stopping control for one minimize call.

    ``progress_threshold`` is the final trust-region radius: optimization
    stops once per-step progress potential falls below it.  ``seed`` is
    carried for the caller's objective seeding discipline; the trust
    region search itself is deterministic.
    """

    max_iters: int = 4000
    progress_threshold: float = 1e-6
    initial_step: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.progress_threshold < 0:
            raise ValueError("progress_threshold must be >= 0")


@dataclass
class OptimResult:
    best_params: np.ndarray
    best_value: float
    iterations_used: int
    trajectory: List[Tuple[int, float]]


def minimize(objective: Callable[[np.ndarray], float], x0: Sequence[float], cfg: OptimConfig) -> OptimResult:
    """Minimize a total, deterministic objective from ``x0``.

    Every objective evaluation is recorded as one trajectory entry, so
    ``iterations_used == len(trajectory) <= cfg.max_iters`` and
    ``best_value`` is the running minimum (never worse than the value at
    ``x0``).
    """
    x0 = np.asarray(x0, dtype=float)
    trajectory: List[Tuple[int, float]] = []
    best_value = np.inf
    best_params = x0.copy()

    def record(x: np.ndarray) -> float:
        nonlocal best_value, best_params
        value = float(objective(np.asarray(x, dtype=float)))
        trajectory.append((len(trajectory) + 1, value))
        if value < best_value:
            best_value = value
            best_params = np.array(x, dtype=float, copy=True)
        return value

    if x0.size == 0:
        record(x0)
    else:
        rhoend = float(cfg.progress_threshold)
        rhobeg = max(float(cfg.initial_step), rhoend)
        _scipy_minimize(
            record,
            x0,
            method="COBYLA",
            tol=rhoend,
            options={"rhobeg": rhobeg, "maxiter": cfg.max_iters},
        )
    return OptimResult(
        best_params=best_params,
        best_value=best_value,
        iterations_used=len(trajectory),
        trajectory=trajectory,
    )


def _shiftable_slots(circuit: Circuit) -> set[int]:
    counts: dict[int, int] = {}
    kinds: dict[int, GateKind] = {}
    scales: dict[int, float] = {}
    for gate in circuit.gates:
        if gate.param_slot is None:
            continue
        counts[gate.param_slot] = counts.get(gate.param_slot, 0) + 1
        kinds[gate.param_slot] = gate.kind
        scales[gate.param_slot] = gate.param_scale
    return {
        slot
        for slot, count in counts.items()
        if count == 1 and kinds[slot] in SHIFT_COMPATIBLE_KINDS and abs(scales[slot]) == 1.0
    }


def parameter_shift_gradient(
    circuit: Circuit,
    h: PauliSum,
    params: Sequence[float],
    shift_applicable: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Exact gradient of <H> via +/- pi/2 evaluations, one slot at a time.

    ``shift_applicable`` selects the slots to differentiate (default:
    all).  Every selected slot must drive exactly one single-qubit
    rotation gate with unit scale; other slots raise, since their
    generators break the two-point shift identity.  Unselected components
    are returned as 0.
    """
    params = np.asarray(params, dtype=float)
    slots = range(circuit.param_count) if shift_applicable is None else shift_applicable
    allowed = _shiftable_slots(circuit)
    gradient = np.zeros(circuit.param_count)
    for slot in slots:
        if slot not in allowed:
            raise ValueError(
                f"slot {slot} is not shift-compatible (needs a single unit-scale RX/RY/RZ gate)"
            )
        shifted = params.copy()
        shifted[slot] += np.pi / 2
        plus = expectation_exact(run_circuit(circuit, shifted), h)
        shifted[slot] -= np.pi
        minus = expectation_exact(run_circuit(circuit, shifted), h)
        gradient[slot] = (plus - minus) / 2.0
    return gradient


@dataclass(frozen=True)
class SeedPolicy:
    """Shot-seed discipline for objective closures.

    ``fresh`` derives a new sub-seed per call from (seed, stream, call
    index), mimicking hardware shot noise while staying reproducible;
    ``fixed`` reuses the call-0 sub-seed so repeated evaluations at equal
    parameters return equal values.
    """

    mode: str = "fresh"
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.mode not in ("fresh", "fixed"):
            raise ValueError(f"unknown seed mode {self.mode!r}")

    def call_seed(self, call_index: int) -> int:
        index = call_index if self.mode == "fresh" else 0
        return derive_seed(self.seed, self.stream, index)


def make_objective(
    circuit: Circuit,
    h: PauliSum,
    shots: Optional[int] = None,
    seed_policy: Optional[SeedPolicy] = None,
    observer: Optional[Callable[[Statevector, Optional[np.ndarray]], None]] = None,
) -> Callable[[np.ndarray], float]:
    """Closure mapping parameters to the (shot-estimated) energy from |0>.

    ``shots=None`` evaluates exactly.  With shots, each call samples
    under the seed policy; diagonal Hamiltonians score the single Z-basis
    histogram directly.  ``observer``, if given, sees the prepared state
    and the sampled basis indices (None in exact mode) once per call --
    the hook the training schedules use to trace metrics.
    """
    if shots is not None and shots < 1:
        raise ValueError("shots must be >= 1 (or None for exact evaluation)")
    policy = seed_policy or SeedPolicy()
    diagonal = h.diagonal() if (shots is not None and h.is_diagonal()) else None
    calls = 0

    def objective(params: np.ndarray) -> float:
        nonlocal calls
        state = run_circuit(circuit, params)
        indices = None
        if shots is None:
            value = expectation_exact(state, h)
        else:
            call_seed = policy.call_seed(calls)
            if diagonal is not None:
                indices = sample_indices(state, shots, shot_rng(call_seed))
                value = float(diagonal[indices].mean())
            else:
                value = expectation_shots(state, h, shots, call_seed)
        calls += 1
        if observer is not None:
            observer(state, indices)
        return value

    return objective

"""Pauli-string algebra: weighted sums, expectation values, partial assembly.

A :class:`PauliSum` keeps its terms in the order they were constructed;
that order is meaningful (partial-assembly partitions index into it) and
is only reordered by :func:`simplify`, which merges like terms and sorts
canonically.  Coloring Hamiltonians and every other sum used by the
training schedules are real-weighted, so coefficients are plain floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .simulator import (
    Statevector,
    _H_MATRIX,
    _X_MATRIX,
    _Y_MATRIX,
    _Y_TO_Z_MATRIX,
    _apply_single_qubit,
    _parity_signs,
    exact_probabilities,
    sample_indices,
    shot_rng,
)

AXES = ("X", "Y", "Z")
ZERO_COEFF_TOL = 1e-12


def derive_seed(root: int, *branch: int) -> int:
    """Derive an independent 128-bit sub-seed from ``root`` and a branch key.

    Uses numpy's SeedSequence spawn-key mechanism so derived streams are
    statistically independent and reproducible across runs.
    """
    words = np.random.SeedSequence(root, spawn_key=tuple(branch)).generate_state(2, np.uint64)
    return int(words[0]) | (int(words[1]) << 64)


class PauliTerm:
    """A real coefficient times a product of single-qubit Pauli operators.

    ``ops`` maps qubit index to axis ("X", "Y" or "Z"); absent qubits act
    as identity.  The empty map is the identity term.
    """

    __slots__ = ("coefficient", "ops")

    def __init__(self, coefficient: float, ops: Mapping[int, str] | Iterable[tuple[int, str]] = ()):
        self.coefficient = float(coefficient)
        items = ops.items() if isinstance(ops, Mapping) else ops
        normalized = {}
        for qubit, axis in items:
            qubit = int(qubit)
            axis = str(axis).upper()
            if qubit < 0:
                raise ValueError(f"negative qubit index {qubit}")
            if axis not in AXES:
                raise ValueError(f"invalid Pauli axis {axis!r}")
            if qubit in normalized:
                raise ValueError(f"duplicate qubit {qubit} in Pauli term")
            normalized[qubit] = axis
        self.ops: Dict[int, str] = dict(sorted(normalized.items()))

    @property
    def locality(self) -> int:
        """Number of non-identity sites."""
        return len(self.ops)

    @property
    def key(self) -> Tuple[Tuple[int, str], ...]:
        return tuple(self.ops.items())

    def is_diagonal(self) -> bool:
        return all(axis == "Z" for axis in self.ops.values())

    def z_mask(self) -> int:
        if not self.is_diagonal():
            raise ValueError("z_mask is only defined for Z/identity terms")
        mask = 0
        for qubit in self.ops:
            mask |= 1 << qubit
        return mask

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliTerm)
            and self.coefficient == other.coefficient
            and self.ops == other.ops
        )

    def __repr__(self) -> str:
        body = " ".join(f"{axis}{q}" for q, axis in self.ops.items()) or "I"
        return f"PauliTerm({self.coefficient!r}, {body})"


class PauliSum:
    """An ordered list of Pauli terms on a fixed qubit register."""

    __slots__ = ("terms", "n_qubits", "_diagonal_cache")

    def __init__(self, terms: Sequence[PauliTerm], n_qubits: int):
        self.n_qubits = int(n_qubits)
        self.terms: List[PauliTerm] = list(terms)
        for term in self.terms:
            if term.ops and max(term.ops) >= self.n_qubits:
                raise ValueError(
                    f"term {term!r} touches qubit {max(term.ops)}, register has {self.n_qubits}"
                )
        self._diagonal_cache: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.terms)

    def is_diagonal(self) -> bool:
        return all(term.is_diagonal() for term in self.terms)

    def diagonal(self) -> np.ndarray:
        """Dense diagonal of an all-Z sum, indexed by basis state."""
        if self._diagonal_cache is None:
            if not self.is_diagonal():
                raise ValueError("diagonal() requires an all-Z sum")
            dim = 1 << self.n_qubits
            diag = np.zeros(dim, dtype=float)
            for term in self.terms:
                if term.ops:
                    diag += term.coefficient * _parity_signs(dim, term.ops.keys())
                else:
                    diag += term.coefficient
            self._diagonal_cache = diag
        return self._diagonal_cache

    def __repr__(self) -> str:
        return f"PauliSum({len(self.terms)} terms, {self.n_qubits} qubits)"


@dataclass(frozen=True)
class Partition:
    """Ordered blocks of term indices of a PauliSum.

    Blocks must jointly cover the term-index range; only problem-informed
    partitioning may produce overlapping blocks.
    """

    blocks: Tuple[Tuple[int, ...], ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.blocks):
            raise ValueError("labels must match block count")

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def validate_partition(partition: Partition, n_terms: int, require_disjoint: bool = False) -> None:
    seen: set[int] = set()
    total = 0
    for block in partition.blocks:
        for index in block:
            if not 0 <= index < n_terms:
                raise ValueError(f"term index {index} outside [0, {n_terms})")
        total += len(block)
        seen.update(block)
    if seen != set(range(n_terms)):
        raise ValueError("partition blocks do not cover all term indices")
    if require_disjoint and total != n_terms:
        raise ValueError("partition blocks overlap")


def simplify(pauli_sum: PauliSum) -> PauliSum:
    """Merge like terms, drop near-zero coefficients, sort canonically.

    Coefficients of identical op maps are accumulated in input order;
    terms with |coefficient| < 1e-12 are dropped; the output is ordered
    lexicographically by (qubit, axis) pairs, identity first.
    """
    merged: Dict[Tuple[Tuple[int, str], ...], float] = {}
    for term in pauli_sum.terms:
        merged[term.key] = merged.get(term.key, 0.0) + term.coefficient
    terms = [
        PauliTerm(coeff, key)
        for key, coeff in sorted(merged.items())
        if abs(coeff) >= ZERO_COEFF_TOL
    ]
    return PauliSum(terms, pauli_sum.n_qubits)


def locality_histogram(pauli_sum: PauliSum) -> Dict[int, int]:
    """Count simplified terms by locality; the identity reports at 0."""
    histogram: Dict[int, int] = {}
    for term in simplify(pauli_sum).terms:
        histogram[term.locality] = histogram.get(term.locality, 0) + 1
    return histogram


def assemble_prefix(pauli_sum: PauliSum, partition: Partition, k: int) -> PauliSum:
    """Simplified sum of the terms indexed by the first ``k`` blocks.

    Overlapping blocks contribute each index once; the union is gathered
    in ascending index order, so the k = n_blocks case reproduces
    ``simplify(pauli_sum)`` exactly.
    """
    if not 1 <= k <= partition.n_blocks:
        raise ValueError(f"k={k} outside [1, {partition.n_blocks}]")
    indices: set[int] = set()
    for block in partition.blocks[:k]:
        indices.update(block)
    for index in indices:
        if not 0 <= index < len(pauli_sum.terms):
            raise ValueError(f"partition references term index {index} outside the sum")
    terms = [pauli_sum.terms[i] for i in sorted(indices)]
    return simplify(PauliSum(terms, pauli_sum.n_qubits))


def expectation_exact(state: Statevector, pauli_sum: PauliSum) -> float:
    """Exact expectation <psi|H|psi>.

    All-Z sums take the diagonal fast path (no basis rotation); general
    sums apply each term's Pauli factors to a scratch copy of the state.
    """
    if state.n_qubits != pauli_sum.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, sum has {pauli_sum.n_qubits}"
        )
    if pauli_sum.is_diagonal():
        return float(exact_probabilities(state) @ pauli_sum.diagonal())
    value = 0.0
    for term in pauli_sum.terms:
        scratch = state.amplitudes.copy()
        for qubit, axis in term.ops.items():
            if axis == "Z":
                scratch *= _parity_signs(scratch.shape[0], (qubit,))
            elif axis == "X":
                _apply_single_qubit(scratch, qubit, _X_MATRIX)
            else:
                _apply_single_qubit(scratch, qubit, _Y_MATRIX)
        value += term.coefficient * float(np.real(np.vdot(state.amplitudes, scratch)))
    return value


def _compatible_groups(terms: Sequence[PauliTerm]) -> List[tuple[Dict[int, str], List[PauliTerm]]]:
    """Greedy first-fit grouping of terms sharing one measurement basis."""
    groups: List[tuple[Dict[int, str], List[PauliTerm]]] = []
    for term in terms:
        placed = False
        for axes, members in groups:
            if all(axes.get(q, axis) == axis for q, axis in term.ops.items()):
                axes.update(term.ops)
                members.append(term)
                placed = True
                break
        if not placed:
            groups.append((dict(term.ops), [term]))
    return groups


def expectation_shots(state: Statevector, pauli_sum: PauliSum, shots: int, seed: int) -> float:
    """Shot-based estimate of the expectation value, deterministic per seed.

    Terms are grouped into single-basis-compatible groups; every group is
    measured with ``shots`` samples after the per-qubit basis rotations
    (H for X, H S^dag for Y).  All-Z sums form one group measured in the
    computational basis with the seed used directly; further groups use
    sub-seeds derived from (seed, group index).
    """
    if state.n_qubits != pauli_sum.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, sum has {pauli_sum.n_qubits}"
        )
    if shots < 1:
        raise ValueError("shots must be >= 1")

    value = 0.0
    groups = _compatible_groups(pauli_sum.terms)
    for group_index, (axes, members) in enumerate(groups):
        identity_part = sum(t.coefficient for t in members if not t.ops)
        value += identity_part
        measured = [t for t in members if t.ops]
        if not measured:
            continue
        rotated = state.amplitudes
        if any(axis != "Z" for axis in axes.values()):
            rotated = rotated.copy()
            for qubit, axis in axes.items():
                if axis == "X":
                    _apply_single_qubit(rotated, qubit, _H_MATRIX)
                elif axis == "Y":
                    _apply_single_qubit(rotated, qubit, _Y_TO_Z_MATRIX)
        group_seed = seed if group_index == 0 else derive_seed(seed, group_index)
        indices = sample_indices(
            Statevector(state.n_qubits, rotated), shots, shot_rng(group_seed)
        )
        for term in measured:
            signs = _parity_signs(1 << state.n_qubits, term.ops.keys())
            value += term.coefficient * float(signs[indices].mean())
    return value


def serialize_pauli_sum(pauli_sum: PauliSum) -> str:
    """One term per line: ``<coeff> Z0 Z2``; the identity term is ``<coeff> I``."""
    lines = []
    for term in pauli_sum.terms:
        body = " ".join(f"{axis}{qubit}" for qubit, axis in term.ops.items()) or "I"
        lines.append(f"{term.coefficient!r} {body}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_pauli_sum(text: str, n_qubits: int) -> PauliSum:
    """Inverse of :func:`serialize_pauli_sum`."""
    terms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        coeff = float(fields[0])
        ops: Dict[int, str] = {}
        for token in fields[1:]:
            if token == "I":
                continue
            axis, qubit = token[0], token[1:]
            ops[int(qubit)] = axis
        terms.append(PauliTerm(coeff, ops))
    return PauliSum(terms, n_qubits)

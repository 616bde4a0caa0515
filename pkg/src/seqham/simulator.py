"""Dense statevector simulation of n-qubit circuits.

Conventions used throughout the package:

* Amplitude layout is little-endian: qubit ``q`` corresponds to bit ``q``
  of the basis-state index.  Basis bitstrings are rendered with character
  ``i`` equal to the value of qubit ``i`` (so index 1 on two qubits is
  the string ``"10"``).
* Rotation gates implement ``exp(-i*theta/2 * P)`` for their generator
  ``P``, e.g. ``RZ(theta) = diag(exp(-i*theta/2), exp(+i*theta/2))``.
* Gates are applied with strided in-place updates; no 2^n x 2^n matrix is
  ever materialized.
* Shot sampling uses the counter-based Philox generator with explicit
  inverse-CDF sampling, so identical ``(state, shots, seed)`` give
  identical histograms on any platform with the same numpy build.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

MAX_QUBITS = 24

_SQRT2INV = 1.0 / np.sqrt(2.0)
_H_MATRIX = np.array([[_SQRT2INV, _SQRT2INV], [_SQRT2INV, -_SQRT2INV]], dtype=np.complex128)
_X_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_Y_MATRIX = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
_Z_MATRIX = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
# Rotates the Y measurement basis onto Z: (H S^dag) Y (H S^dag)^dag = Z.
_Y_TO_Z_MATRIX = _H_MATRIX @ np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=np.complex128)


class ResourceLimitError(RuntimeError):
    """Raised when a requested register exceeds the dense-simulation cap."""


class GateKind(Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    H = "H"
    X = "X"
    CNOT = "CNOT"
    CRZ = "CRZ"
    CRX = "CRX"
    RZZ = "RZZ"
    MULTI_Z_PHASE = "MULTI_Z_PHASE"


PARAMETERIZED_KINDS = frozenset(
    {GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CRZ, GateKind.CRX, GateKind.RZZ, GateKind.MULTI_Z_PHASE}
)

_GATE_ARITY = {
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.H: 1,
    GateKind.X: 1,
    GateKind.CNOT: 2,
    GateKind.CRZ: 2,
    GateKind.CRX: 2,
    GateKind.RZZ: 2,
    GateKind.MULTI_Z_PHASE: None,  # any locality >= 1
}


@dataclass(frozen=True)
class Gate:
    """One gate in a circuit program.

    Parameterized kinds take their angle either from a parameter slot
    (``param_slot``, scaled by ``param_scale``) or from a fixed ``angle``
    in radians; exactly one of the two must be set.  Two-qubit controlled
    kinds list the control first.  ``MULTI_Z_PHASE`` acts diagonally,
    multiplying each basis amplitude by ``exp(-i*theta/2 * z)`` where
    ``z`` is the +/-1 parity product of its qubits' Z eigenvalues.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    param_slot: Optional[int] = None
    angle: Optional[float] = None
    param_scale: float = 1.0

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit indices in {self.kind.value} gate: {self.qubits}")
        arity = _GATE_ARITY[self.kind]
        if arity is not None and len(self.qubits) != arity:
            raise ValueError(f"{self.kind.value} expects {arity} qubits, got {len(self.qubits)}")
        if self.kind is GateKind.MULTI_Z_PHASE and not self.qubits:
            raise ValueError("MULTI_Z_PHASE needs at least one qubit")
        if self.kind in PARAMETERIZED_KINDS:
            if (self.param_slot is None) == (self.angle is None):
                raise ValueError(f"{self.kind.value} needs exactly one angle source (slot xor fixed angle)")
        elif self.param_slot is not None or self.angle is not None:
            raise ValueError(f"{self.kind.value} takes no angle")

    @property
    def parameterized(self) -> bool:
        return self.param_slot is not None


@dataclass
class Statevector:
    """2^n complex amplitudes of an n-qubit register."""

    n_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.sqrt((np.abs(self.amplitudes) ** 2).sum()))


@dataclass
class ShotHistogram:
    """Measured bitstring counts; keys follow the little-endian rendering."""

    counts: Dict[str, int]
    total_shots: int

    def modal_bitstring(self) -> str:
        """Most frequent bitstring; ties broken by lowest basis-index value."""
        best = None
        best_count = -1
        for bits, c in self.counts.items():
            if c > best_count or (c == best_count and bitstring_to_index(bits) < bitstring_to_index(best)):
                best, best_count = bits, c
        if best is None:
            raise ValueError("empty histogram")
        return best


def index_to_bitstring(index: int, n_qubits: int) -> str:
    """Render a basis index with character i holding qubit i's value."""
    return "".join("1" if (index >> q) & 1 else "0" for q in range(n_qubits))


def bitstring_to_index(bits: str) -> int:
    index = 0
    for q, ch in enumerate(bits):
        if ch == "1":
            index |= 1 << q
        elif ch != "0":
            raise ValueError(f"invalid bitstring character {ch!r}")
    return index


def new_zero_state(n_qubits: int) -> Statevector:
    """Prepare |0...0> on ``n_qubits`` qubits."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if n_qubits > MAX_QUBITS:
        raise ResourceLimitError(
            f"{n_qubits} qubits exceeds the dense statevector cap of {MAX_QUBITS} "
            f"(2^{n_qubits} amplitudes)"
        )
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return Statevector(n_qubits, amplitudes)


def _apply_single_qubit(amplitudes: np.ndarray, qubit: int, matrix: np.ndarray) -> None:
    stride = 1 << qubit
    view = amplitudes.reshape(-1, 2, stride)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = matrix[0, 0] * lo + matrix[0, 1] * hi
    view[:, 1, :] = matrix[1, 0] * lo + matrix[1, 1] * hi


def _apply_controlled_single_qubit(amplitudes: np.ndarray, control: int, target: int, matrix: np.ndarray) -> None:
    n = amplitudes.shape[0]
    index = np.arange(n)
    sel = (((index >> control) & 1) == 1) & (((index >> target) & 1) == 0)
    idx0 = index[sel]
    idx1 = idx0 | (1 << target)
    lo = amplitudes[idx0]
    hi = amplitudes[idx1]
    amplitudes[idx0] = matrix[0, 0] * lo + matrix[0, 1] * hi
    amplitudes[idx1] = matrix[1, 0] * lo + matrix[1, 1] * hi


def _parity_signs(n_amplitudes: int, qubits: Iterable[int]) -> np.ndarray:
    """Per-basis-state +/-1 product of Z eigenvalues on ``qubits``."""
    index = np.arange(n_amplitudes)
    parity = np.zeros(n_amplitudes, dtype=np.int64)
    for q in qubits:
        parity ^= (index >> q) & 1
    return 1 - 2 * parity


def _apply_z_phase(amplitudes: np.ndarray, qubits: Sequence[int], theta: float) -> None:
    signs = _parity_signs(amplitudes.shape[0], qubits)
    amplitudes *= np.exp(-0.5j * theta * signs)


def _rotation_matrix(kind: GateKind, theta: float) -> np.ndarray:
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    if kind in (GateKind.RX, GateKind.CRX):
        return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=np.complex128)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind in (GateKind.RZ, GateKind.CRZ):
        return np.array([[c - 1.0j * s, 0.0], [0.0, c + 1.0j * s]], dtype=np.complex128)
    raise ValueError(f"{kind.value} is not a rotation kind")


def apply_gate(state: Statevector, gate: Gate, angle: Optional[float] = None) -> Statevector:
    """Apply one gate in place and return the state.

    ``angle`` must be supplied iff the gate draws its angle from a
    parameter slot (the caller resolves the slot).
    """
    if gate.parameterized:
        if angle is None:
            raise ValueError(f"{gate.kind.value} gate is slot-parameterized; supply the resolved angle")
    elif angle is not None:
        raise ValueError(f"{gate.kind.value} gate does not take a runtime angle")
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"qubit index {q} out of range for {state.n_qubits} qubits")

    theta = angle if angle is not None else gate.angle
    amplitudes = state.amplitudes
    kind = gate.kind
    if kind is GateKind.H:
        _apply_single_qubit(amplitudes, gate.qubits[0], _H_MATRIX)
    elif kind is GateKind.X:
        _apply_single_qubit(amplitudes, gate.qubits[0], _X_MATRIX)
    elif kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
        _apply_single_qubit(amplitudes, gate.qubits[0], _rotation_matrix(kind, theta))
    elif kind is GateKind.CNOT:
        _apply_controlled_single_qubit(amplitudes, gate.qubits[0], gate.qubits[1], _X_MATRIX)
    elif kind in (GateKind.CRZ, GateKind.CRX):
        _apply_controlled_single_qubit(amplitudes, gate.qubits[0], gate.qubits[1], _rotation_matrix(kind, theta))
    elif kind in (GateKind.RZZ, GateKind.MULTI_Z_PHASE):
        _apply_z_phase(amplitudes, gate.qubits, theta)
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unhandled gate kind {kind}")
    return state


def exact_probabilities(state: Statevector) -> np.ndarray:
    """Born probabilities |amplitude_i|^2 of every basis state."""
    return np.abs(state.amplitudes) ** 2


def shot_rng(seed: int) -> np.random.Generator:
    """Philox generator keyed by a (possibly >64-bit) integer seed."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, (seed >> 64) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_indices(state: Statevector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw basis-state indices from the Born distribution via inverse CDF."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = exact_probabilities(state)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(shots), side="right")


def sample_shots(state: Statevector, shots: int, seed: int) -> ShotHistogram:
    """Sample a histogram of ``shots`` computational-basis measurements."""
    indices = sample_indices(state, shots, shot_rng(seed))
    values, counts = np.unique(indices, return_counts=True)
    histogram = {
        index_to_bitstring(int(v), state.n_qubits): int(c) for v, c in zip(values, counts)
    }
    return ShotHistogram(counts=histogram, total_shots=shots)


def run_circuit(circuit, params: Sequence[float], initial: Optional[Statevector] = None) -> Statevector:
    """Run a layered circuit on ``initial`` (default |0...0>).

    ``params`` must have exactly ``circuit.param_count`` entries; slot
    angles are resolved as ``gate.param_scale * params[gate.param_slot]``.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.param_count,):
        raise ValueError(
            f"parameter vector has length {params.shape[0] if params.ndim == 1 else params.shape}, "
            f"circuit needs {circuit.param_count}"
        )
    state = new_zero_state(circuit.n_qubits) if initial is None else initial.copy()
    if state.n_qubits != circuit.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, circuit needs {circuit.n_qubits}")
    for layer in circuit.layers:
        for gate in layer.gates:
            if gate.parameterized:
                apply_gate(state, gate, gate.param_scale * float(params[gate.param_slot]))
            else:
                apply_gate(state, gate)
    return state

"""Layered circuit architectures and the alternating-operator circuit.

The catalog below is our interpretation of seven structurally distinct
hardware-efficient designs, keyed A1..A18, combining single-qubit rotation
layers with ladder, ring, or staggered entanglement:

========  =============================================  ==========  ================
id        layer content                                  params/layer  identity at 0
========  =============================================  ==========  ================
A1        RX+RZ on every qubit                           2n          yes
A3        RX+RZ, then CRZ ladder (i -> i+1)              3n-1        yes
A8        RX+RZ, then CRX ladder (i -> i+1)              3n-1        yes
A12       RX+RZ, then fixed CNOT ring                    2n          no
A13       RY, then ring CRZ in staggered (brick) order   2n          yes
A16       RY, then CRZ ladder in staggered (brick) order 2n-1        yes
A18       RY, then ring CRX                              2n          yes
========  =============================================  ==========  ================

Parameter slots are numbered layer by layer in gate order, so the first
``j`` layers of a deep build carry exactly the slots of the ``j``-layer
build; the layerwise training schedules rely on that prefix property.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .pauli import PauliSum, simplify
from .simulator import Gate, GateKind, new_zero_state, run_circuit


class ArchitectureId(Enum):
    A1 = "A1"
    A3 = "A3"
    A8 = "A8"
    A12 = "A12"
    A13 = "A13"
    A16 = "A16"
    A18 = "A18"
    QAOA = "QAOA"


@dataclass(frozen=True)
class Layer:
    """One circuit layer; ``param_slots`` lists the slots it introduces."""

    gates: Tuple[Gate, ...]
    identity_at_zero: bool
    param_slots: Tuple[int, ...]


@dataclass(frozen=True)
class Circuit:
    """A layered gate program with symbolic parameter slots."""

    n_qubits: int
    layers: Tuple[Layer, ...]
    param_count: int

    @property
    def gates(self) -> List[Gate]:
        return [gate for layer in self.layers for gate in layer.gates]

    def slot_layer_map(self) -> Dict[int, int]:
        """Map each parameter slot to the index of the layer introducing it."""
        return {
            slot: layer_index
            for layer_index, layer in enumerate(self.layers)
            for slot in layer.param_slots
        }


def _ring_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, (i + 1) % n) for i in range(n)]


def _ladder_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def _staggered(pairs: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Brick order: even-index pairs first, then odd-index pairs."""
    return [p for i, p in enumerate(pairs) if i % 2 == 0] + [
        p for i, p in enumerate(pairs) if i % 2 == 1
    ]


def _rotation_wall(n: int, kinds: Sequence[GateKind], slot: int) -> tuple[List[Gate], int]:
    gates = []
    for q in range(n):
        for kind in kinds:
            gates.append(Gate(kind, (q,), param_slot=slot))
            slot += 1
    return gates, slot


def _entangler_wall(
    pairs: Sequence[Tuple[int, int]], kind: GateKind, slot: Optional[int]
) -> tuple[List[Gate], int]:
    gates = []
    for control, target in pairs:
        if slot is None:
            gates.append(Gate(kind, (control, target)))
        else:
            gates.append(Gate(kind, (control, target), param_slot=slot))
            slot += 1
    return gates, (slot if slot is not None else 0)


def _build_layer(arch: ArchitectureId, n: int, slot: int) -> tuple[Layer, int]:
    start = slot
    if arch is ArchitectureId.A1:
        gates, slot = _rotation_wall(n, (GateKind.RX, GateKind.RZ), slot)
        identity = True
    elif arch is ArchitectureId.A3:
        gates, slot = _rotation_wall(n, (GateKind.RX, GateKind.RZ), slot)
        ent, slot = _entangler_wall(_ladder_pairs(n), GateKind.CRZ, slot)
        gates += ent
        identity = True
    elif arch is ArchitectureId.A8:
        gates, slot = _rotation_wall(n, (GateKind.RX, GateKind.RZ), slot)
        ent, slot = _entangler_wall(_ladder_pairs(n), GateKind.CRX, slot)
        gates += ent
        identity = True
    elif arch is ArchitectureId.A12:
        gates, slot = _rotation_wall(n, (GateKind.RX, GateKind.RZ), slot)
        ent, _ = _entangler_wall(_ring_pairs(n), GateKind.CNOT, None)
        gates += ent
        identity = False
    elif arch is ArchitectureId.A13:
        gates, slot = _rotation_wall(n, (GateKind.RY,), slot)
        ent, slot = _entangler_wall(_staggered(_ring_pairs(n)), GateKind.CRZ, slot)
        gates += ent
        identity = True
    elif arch is ArchitectureId.A16:
        gates, slot = _rotation_wall(n, (GateKind.RY,), slot)
        ent, slot = _entangler_wall(_staggered(_ladder_pairs(n)), GateKind.CRZ, slot)
        gates += ent
        identity = True
    elif arch is ArchitectureId.A18:
        gates, slot = _rotation_wall(n, (GateKind.RY,), slot)
        ent, slot = _entangler_wall(_ring_pairs(n), GateKind.CRX, slot)
        gates += ent
        identity = True
    else:
        raise ValueError(f"unknown catalog architecture {arch}")
    return Layer(tuple(gates), identity, tuple(range(start, slot))), slot


def params_per_layer(arch: ArchitectureId, n_qubits: int) -> int:
    """Documented parameter-count formula for one catalog layer."""
    formulas: Dict[ArchitectureId, Callable[[int], int]] = {
        ArchitectureId.A1: lambda n: 2 * n,
        ArchitectureId.A3: lambda n: 3 * n - 1,
        ArchitectureId.A8: lambda n: 3 * n - 1,
        ArchitectureId.A12: lambda n: 2 * n,
        ArchitectureId.A13: lambda n: 2 * n,
        ArchitectureId.A16: lambda n: 2 * n - 1,
        ArchitectureId.A18: lambda n: 2 * n,
    }
    if arch not in formulas:
        raise ValueError(f"{arch} has no per-layer formula")
    return formulas[arch](n_qubits)


def build_ansatz(arch: ArchitectureId, n_qubits: int, n_layers: int) -> Circuit:
    """Build a catalog architecture with ``n_layers`` identical layers."""
    if isinstance(arch, str):
        arch = ArchitectureId(arch)
    if arch is ArchitectureId.QAOA:
        raise ValueError("use build_qaoa for the alternating-operator circuit")
    if n_layers < 1:
        raise ValueError("n_layers must be >= 1")
    if n_qubits < 2:
        raise ValueError("catalog architectures need at least two qubits")
    layers = []
    slot = 0
    for _ in range(n_layers):
        layer, slot = _build_layer(arch, n_qubits, slot)
        layers.append(layer)
    return Circuit(n_qubits, tuple(layers), slot)


def ry_layer(n_qubits: int, slot_start: int = 0) -> Layer:
    """Parameterized RY rotations on every qubit (layerwise warm-up layer)."""
    gates = tuple(Gate(GateKind.RY, (q,), param_slot=slot_start + q) for q in range(n_qubits))
    return Layer(gates, True, tuple(range(slot_start, slot_start + n_qubits)))


def _shift_slots(layer: Layer, offset: int) -> Layer:
    gates = tuple(
        replace(g, param_slot=g.param_slot + offset) if g.param_slot is not None else g
        for g in layer.gates
    )
    return Layer(gates, layer.identity_at_zero, tuple(s + offset for s in layer.param_slots))


def prepend_ry_layer(circuit: Circuit) -> Circuit:
    """Prefix an RY layer; existing slots shift up by ``n_qubits``."""
    n = circuit.n_qubits
    layers = (ry_layer(n),) + tuple(_shift_slots(layer, n) for layer in circuit.layers)
    return Circuit(n, layers, circuit.param_count + n)


def build_qaoa(h_cost: PauliSum, p: int) -> Circuit:
    """Alternating cost/mixer circuit over a diagonal cost Hamiltonian.

    Layout: a Hadamard wall, then ``p`` alternations of the cost unitary
    ``exp(-i*gamma_i*H)`` (one MULTI_Z_PHASE per non-identity term, slot
    angle scaled by twice the coefficient; identity terms only shift the
    global phase and are skipped) and the transverse-field mixer
    ``exp(-i*beta_i*(-sum_q X_q))``, i.e. RX with slot scale -2 on every
    qubit.  Parameters: slots ``0..p-1`` are beta, ``p..2p-1`` are gamma.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if not h_cost.is_diagonal():
        raise ValueError("cost Hamiltonian must be diagonal (Z/identity terms only)")
    n = h_cost.n_qubits
    cost_terms = [t for t in simplify(h_cost).terms if t.ops]
    layers = [Layer(tuple(Gate(GateKind.H, (q,)) for q in range(n)), False, ())]
    for i in range(p):
        beta_slot, gamma_slot = i, p + i
        cost_gates = tuple(
            Gate(
                GateKind.MULTI_Z_PHASE,
                tuple(term.ops.keys()),
                param_slot=gamma_slot,
                param_scale=2.0 * term.coefficient,
            )
            for term in cost_terms
        )
        layers.append(Layer(cost_gates, True, (gamma_slot,)))
        mixer_gates = tuple(
            Gate(GateKind.RX, (q,), param_slot=beta_slot, param_scale=-2.0) for q in range(n)
        )
        layers.append(Layer(mixer_gates, True, (beta_slot,)))
    return Circuit(n, tuple(layers), 2 * p)


def constant_speed_init(p: int) -> np.ndarray:
    """Linear anneal-schedule start: beta_i = 1 - i/p, gamma_i = i/p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    betas = [1.0 - i / p for i in range(1, p + 1)]
    gammas = [i / p for i in range(1, p + 1)]
    return np.array(betas + gammas, dtype=float)


def collect_slot_references(circuit: Circuit) -> Dict[int, int]:
    """How many gates reference each parameter slot."""
    refs: Dict[int, int] = {}
    for gate in circuit.gates:
        if gate.param_slot is not None:
            refs[gate.param_slot] = refs.get(gate.param_slot, 0) + 1
    return refs


def verify_identity_at_zero(circuit: Circuit, tol: float = 1e-10) -> bool:
    """Check that the circuit at zero parameters is the identity map.

    Probes every computational basis state for n <= 6 (a complete check);
    larger registers are spot-checked on 16 seeded basis states plus |0>.
    """
    n = circuit.n_qubits
    zeros = np.zeros(circuit.param_count)
    if n <= 6:
        probes = range(1 << n)
    else:
        rng = np.random.default_rng(0)
        probes = [0] + sorted(int(v) for v in rng.integers(0, 1 << n, size=16))
    for index in probes:
        state = new_zero_state(n)
        state.amplitudes[0] = 0.0
        state.amplitudes[index] = 1.0
        out = run_circuit(circuit, zeros, initial=state)
        expected = np.zeros(1 << n, dtype=np.complex128)
        expected[index] = 1.0
        if np.abs(out.amplitudes - expected).max() > tol:
            return False
    return True


def format_circuit(circuit: Circuit) -> str:
    """One gate per line, e.g. ``RX q0 slot3`` or ``CRZ q0 q1 slot7``."""
    lines = []
    for layer_index, layer in enumerate(circuit.layers):
        lines.append(f"# layer {layer_index} (identity_at_zero={layer.identity_at_zero})")
        for gate in layer.gates:
            parts = [gate.kind.value] + [f"q{q}" for q in gate.qubits]
            if gate.param_slot is not None:
                parts.append(f"slot{gate.param_slot}")
                if gate.param_scale != 1.0:
                    parts.append(f"scale={gate.param_scale!r}")
            elif gate.angle is not None:
                parts.append(f"angle={gate.angle!r}")
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"

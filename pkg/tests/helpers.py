"""Shared test builders: random circuits and Hamiltonians for gradient checks."""

import numpy as np

from seqham.ansatz import Circuit, Layer
from seqham.pauli import PauliSum, PauliTerm
from seqham.simulator import Gate, GateKind


def random_shift_circuit(n_qubits: int, rng: np.random.Generator) -> Circuit:
    """Random test circuit: slotted single-qubit rotations plus fixed entanglers."""
    rotations = [GateKind.RX, GateKind.RY, GateKind.RZ]
    gates = []
    slot = 0
    for _ in range(2):
        for q in range(n_qubits):
            gates.append(Gate(rotations[rng.integers(3)], (q,), param_slot=slot))
            slot += 1
        for q in range(n_qubits - 1):
            if rng.random() < 0.7:
                gates.append(Gate(GateKind.CNOT, (q, q + 1)))
            else:
                gates.append(Gate(GateKind.H, (q,)))
    return Circuit(n_qubits, (Layer(tuple(gates), False, tuple(range(slot))),), slot)


def random_pauli_sum(n_qubits: int, rng: np.random.Generator) -> PauliSum:
    terms = []
    for _ in range(4):
        width = int(rng.integers(1, 3))
        qubits = rng.choice(n_qubits, size=width, replace=False)
        axes = rng.choice(["X", "Y", "Z"], size=width)
        terms.append(PauliTerm(float(rng.normal()), {int(q): str(a) for q, a in zip(qubits, axes)}))
    return PauliSum(terms, n_qubits)

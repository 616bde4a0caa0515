import numpy as np
import pytest
from helpers import random_pauli_sum, random_shift_circuit

from seqham.ansatz import ArchitectureId, Circuit, Layer, build_ansatz
from seqham.optimize import (
    OptimConfig,
    OptimResult,
    SeedPolicy,
    make_objective,
    minimize,
    parameter_shift_gradient,
)
from seqham.pauli import PauliSum, PauliTerm, expectation_exact, expectation_shots
from seqham.simulator import Gate, GateKind, run_circuit


def quadratic(x):
    return float(((x - 1.0) ** 2).sum())


class TestMinimize:
    def test_quadratic_converges(self):
        result = minimize(quadratic, np.zeros(3), OptimConfig(max_iters=200, progress_threshold=1e-6))
        assert result.best_value < 1e-8
        assert result.iterations_used <= 200

    def test_constant_objective_stops_early(self):
        result = minimize(lambda x: 1.0, np.zeros(3), OptimConfig(max_iters=4000, progress_threshold=1e-6))
        assert result.iterations_used < 200
        assert result.best_value == 1.0

    def test_coarse_threshold_uses_fewer_iterations(self):
        coarse = minimize(quadratic, np.zeros(3), OptimConfig(max_iters=1000, progress_threshold=0.8))
        fine = minimize(quadratic, np.zeros(3), OptimConfig(max_iters=1000, progress_threshold=1e-6))
        assert coarse.iterations_used < fine.iterations_used
        assert fine.best_value < coarse.best_value

    def test_never_worse_than_start(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            shifts = rng.normal(size=4)

            def bumpy(x, shifts=shifts):
                return float(np.sin(3 * x).sum() + ((x - shifts) ** 2).sum())

            x0 = rng.normal(size=4)
            result = minimize(bumpy, x0, OptimConfig(max_iters=150, progress_threshold=1e-4))
            assert result.best_value <= bumpy(x0)

    def test_trajectory_invariants(self):
        result = minimize(quadratic, np.zeros(5), OptimConfig(max_iters=120, progress_threshold=1e-8))
        assert len(result.trajectory) == result.iterations_used <= 120
        assert [i for i, _ in result.trajectory] == list(range(1, result.iterations_used + 1))
        values = [v for _, v in result.trajectory]
        assert result.best_value == min(values)
        running = np.minimum.accumulate(values)
        assert all(a >= b for a, b in zip(running, running[1:]))

    def test_budget_binds(self):
        result = minimize(quadratic, np.zeros(6), OptimConfig(max_iters=10, progress_threshold=1e-12))
        assert result.iterations_used == 10

    def test_dimension_zero_returns_start(self):
        result = minimize(lambda x: 2.5, np.array([]), OptimConfig(max_iters=50))
        assert result.best_value == 2.5
        assert result.iterations_used == 1
        assert result.best_params.size == 0

    def test_deterministic(self):
        a = minimize(quadratic, np.zeros(4), OptimConfig(max_iters=100, progress_threshold=1e-6))
        b = minimize(quadratic, np.zeros(4), OptimConfig(max_iters=100, progress_threshold=1e-6))
        assert a.trajectory == b.trajectory
        assert np.array_equal(a.best_params, b.best_params)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OptimConfig(max_iters=0)
        with pytest.raises(ValueError):
            OptimConfig(progress_threshold=-1.0)


class TestParameterShift:
    def _rx_circuit(self):
        gate = Gate(GateKind.RX, (0,), param_slot=0)
        return Circuit(1, (Layer((gate,), True, (0,)),), 1)

    def test_gradient_zero_at_extremum(self):
        h = PauliSum([PauliTerm(1.0, {0: "Z"})], 1)
        grad = parameter_shift_gradient(self._rx_circuit(), h, np.array([0.0]))
        assert abs(grad[0]) < 1e-12

    def test_gradient_at_half_pi(self):
        # <Z> = cos(theta); derivative at pi/2 is -1
        h = PauliSum([PauliTerm(1.0, {0: "Z"})], 1)
        grad = parameter_shift_gradient(self._rx_circuit(), h, np.array([np.pi / 2]))
        assert abs(grad[0] + 1.0) < 1e-12

    def test_matches_central_differences_on_random_circuits(self):
        rng = np.random.default_rng(13)
        eps = 1e-5
        for _ in range(20):
            circuit = random_shift_circuit(4, rng)
            h = random_pauli_sum(4, rng)
            params = rng.uniform(-np.pi, np.pi, size=circuit.param_count)
            analytic = parameter_shift_gradient(circuit, h, params)
            for slot in range(circuit.param_count):
                plus, minus = params.copy(), params.copy()
                plus[slot] += eps
                minus[slot] -= eps
                numeric = (
                    expectation_exact(run_circuit(circuit, plus), h)
                    - expectation_exact(run_circuit(circuit, minus), h)
                ) / (2 * eps)
                assert abs(analytic[slot] - numeric) < 1e-6

    def test_controlled_rotation_slot_rejected(self):
        circuit = build_ansatz(ArchitectureId.A3, 2, 1)
        crz_slot = circuit.param_count - 1
        with pytest.raises(ValueError, match="shift-compatible"):
            parameter_shift_gradient(circuit, PauliSum([PauliTerm(1, {0: "Z"})], 2), np.zeros(circuit.param_count), [crz_slot])

    def test_partial_mask_leaves_other_components_zero(self):
        circuit = build_ansatz(ArchitectureId.A1, 2, 1)
        h = PauliSum([PauliTerm(1.0, {0: "Z"}), PauliTerm(0.5, {1: "Z"})], 2)
        params = np.full(circuit.param_count, 0.3)
        grad = parameter_shift_gradient(circuit, h, params, shift_applicable=[0, 2])
        assert grad[1] == 0.0 and grad[3] == 0.0
        assert grad[0] != 0.0


class TestMakeObjective:
    def _setup(self):
        circuit = build_ansatz(ArchitectureId.A1, 2, 1)
        h = PauliSum([PauliTerm(2.0, {0: "Z", 1: "Z"}), PauliTerm(1.0, {})], 2)
        return circuit, h

    def test_exact_mode_matches_expectation_exact(self):
        circuit, h = self._setup()
        objective = make_objective(circuit, h, shots=None)
        rng = np.random.default_rng(1)
        for _ in range(5):
            params = rng.normal(size=circuit.param_count)
            assert objective(params) == expectation_exact(run_circuit(circuit, params), h)

    def test_fixed_policy_repeatable(self):
        circuit, h = self._setup()
        objective = make_objective(circuit, h, shots=50, seed_policy=SeedPolicy("fixed", seed=3))
        params = np.full(circuit.param_count, 0.4)
        assert objective(params) == objective(params)

    def test_fixed_policy_matches_expectation_shots(self):
        circuit, h = self._setup()
        policy = SeedPolicy("fixed", seed=5, stream=2)
        objective = make_objective(circuit, h, shots=64, seed_policy=policy)
        params = np.full(circuit.param_count, -0.7)
        expected = expectation_shots(run_circuit(circuit, params), h, 64, policy.call_seed(0))
        assert abs(objective(params) - expected) < 1e-12

    def test_fresh_policy_varies_but_is_unbiased(self):
        circuit, h = self._setup()
        objective = make_objective(circuit, h, shots=200, seed_policy=SeedPolicy("fresh", seed=11))
        params = np.full(circuit.param_count, 0.9)
        values = np.array([objective(params) for _ in range(300)])
        assert len(set(values.tolist())) > 1
        exact = expectation_exact(run_circuit(circuit, params), h)
        standard_error = values.std(ddof=1) / np.sqrt(len(values))
        assert abs(values.mean() - exact) < 4 * standard_error + 1e-12

    def test_observer_sees_every_call(self):
        circuit, h = self._setup()
        seen = []
        objective = make_objective(
            circuit, h, shots=10, seed_policy=SeedPolicy("fresh", 0),
            observer=lambda state, indices: seen.append((state.n_qubits, len(indices))),
        )
        objective(np.zeros(circuit.param_count))
        objective(np.ones(circuit.param_count))
        assert seen == [(2, 10), (2, 10)]

    def test_invalid_policy_mode(self):
        with pytest.raises(ValueError):
            SeedPolicy("sometimes", 0)


def test_optim_result_shape():
    result = minimize(quadratic, np.zeros(2), OptimConfig(max_iters=50, progress_threshold=1e-3))
    assert isinstance(result, OptimResult)
    assert result.best_params.shape == (2,)

import numpy as np
import pytest

from seqham.pauli import (
    Partition,
    PauliSum,
    PauliTerm,
    assemble_prefix,
    derive_seed,
    expectation_exact,
    expectation_shots,
    locality_histogram,
    parse_pauli_sum,
    serialize_pauli_sum,
    simplify,
    validate_partition,
)
from seqham.problems import GraphInstance, coloring_hamiltonian
from seqham.simulator import Gate, GateKind, Statevector, apply_gate, new_zero_state
from seqham.strategies import partition_chronological, partition_nodewise


def random_state(n_qubits, rng):
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    amps /= np.linalg.norm(amps)
    return Statevector(n_qubits, amps.astype(np.complex128))


def brute_force_diagonal(pauli_sum: PauliSum) -> np.ndarray:
    """Independent oracle: evaluate each all-Z term on every basis state."""
    dim = 1 << pauli_sum.n_qubits
    diag = np.zeros(dim)
    for index in range(dim):
        value = 0.0
        for term in pauli_sum.terms:
            sign = 1
            for qubit, axis in term.ops.items():
                assert axis == "Z"
                sign *= 1 - 2 * ((index >> qubit) & 1)
            value += term.coefficient * sign
        diag[index] = value
    return diag


class TestSimplify:
    def test_like_terms_merge(self):
        merged = simplify(PauliSum([PauliTerm(2, {0: "Z"}), PauliTerm(3, {0: "Z"})], 1))
        assert merged.terms == [PauliTerm(5.0, {0: "Z"})]

    def test_cancellation(self):
        merged = simplify(PauliSum([PauliTerm(1, {0: "Z"}), PauliTerm(-1, {0: "Z"})], 1))
        assert merged.terms == []

    def test_single_edge_coloring_has_four_terms(self):
        graph = GraphInstance("e", 2, ((0, 1),), 4, 0, 1.0)
        assert len(simplify(coloring_hamiltonian(graph)).terms) == 4

    def test_canonical_order(self):
        jumbled = PauliSum(
            [PauliTerm(1, {2: "Z"}), PauliTerm(1, {}), PauliTerm(1, {0: "Z", 1: "Z"})], 3
        )
        keys = [t.key for t in simplify(jumbled).terms]
        assert keys == sorted(keys)


class TestLocalityHistogram:
    def test_single_edge_k4(self):
        graph = GraphInstance("e", 2, ((0, 1),), 4, 0, 1.0)
        assert locality_histogram(coloring_hamiltonian(graph)) == {0: 1, 2: 2, 4: 1}

    def test_two_single_qubit_terms(self):
        assert locality_histogram(PauliSum([PauliTerm(1, {0: "Z"}), PauliTerm(1, {1: "Z"})], 2)) == {1: 2}

    def test_empty(self):
        assert locality_histogram(PauliSum([], 2)) == {}


class TestExpectationExact:
    def test_z_on_zero_state(self):
        assert expectation_exact(new_zero_state(1), PauliSum([PauliTerm(1, {0: "Z"})], 1)) == 1.0

    def test_z_on_plus_state(self):
        plus = apply_gate(new_zero_state(1), Gate(GateKind.H, (0,)))
        assert abs(expectation_exact(plus, PauliSum([PauliTerm(1, {0: "Z"})], 1))) < 1e-12

    def test_uniform_state_matches_mean_diagonal(self):
        graph = GraphInstance("sq", 4, ((0, 1), (1, 2), (2, 3), (0, 3)), 4, 0, 1.0)
        h = simplify(coloring_hamiltonian(graph))
        uniform = Statevector(8, np.full(256, 1 / 16, dtype=np.complex128))
        assert abs(expectation_exact(uniform, h) - brute_force_diagonal(h).mean()) < 1e-10

    def test_diagonal_fast_path_matches_oracle_on_random_states(self):
        rng = np.random.default_rng(4)
        for n in (2, 4, 6, 8):
            terms = [
                PauliTerm(
                    float(rng.normal()),
                    {int(q): "Z" for q in rng.choice(n, size=rng.integers(0, n + 1), replace=False)},
                )
                for _ in range(5)
            ]
            h = PauliSum(terms, n)
            state = random_state(n, rng)
            reference = float(np.abs(state.amplitudes) ** 2 @ brute_force_diagonal(h))
            assert abs(expectation_exact(state, h) - reference) < 1e-10

    def test_general_path_x_on_plus(self):
        plus = apply_gate(new_zero_state(1), Gate(GateKind.H, (0,)))
        assert abs(expectation_exact(plus, PauliSum([PauliTerm(1, {0: "X"})], 1)) - 1.0) < 1e-12

    def test_general_path_y(self):
        # RX(-pi/2)|0> is the +1 eigenstate of Y
        state = apply_gate(new_zero_state(1), Gate(GateKind.RX, (0,), angle=-np.pi / 2))
        assert abs(expectation_exact(state, PauliSum([PauliTerm(1, {0: "Y"})], 1)) - 1.0) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="qubits"):
            expectation_exact(new_zero_state(2), PauliSum([PauliTerm(1, {0: "Z"})], 3))


class TestExpectationShots:
    def test_zero_variance_state(self):
        value = expectation_shots(new_zero_state(1), PauliSum([PauliTerm(1, {0: "Z"})], 1), 200, seed=1)
        assert value == 1.0

    def test_plus_state_million_shots(self):
        plus = apply_gate(new_zero_state(1), Gate(GateKind.H, (0,)))
        value = expectation_shots(plus, PauliSum([PauliTerm(1, {0: "Z"})], 1), 10**6, seed=3)
        assert abs(value) < 5e-3

    def test_estimator_unbiased_on_random_diagonal(self):
        rng = np.random.default_rng(8)
        terms = [
            PauliTerm(float(rng.normal()), {int(q): "Z" for q in rng.choice(4, size=2, replace=False)})
            for _ in range(4)
        ]
        h = PauliSum(terms, 4)
        state = random_state(4, rng)
        exact = expectation_exact(state, h)
        estimates = np.array(
            [expectation_shots(state, h, 200, seed=seed) for seed in range(1000)]
        )
        standard_error = estimates.std(ddof=1) / np.sqrt(len(estimates))
        assert abs(estimates.mean() - exact) < 3 * standard_error + 1e-12

    def test_x_eigenstate_measured_exactly(self):
        plus = apply_gate(new_zero_state(1), Gate(GateKind.H, (0,)))
        value = expectation_shots(plus, PauliSum([PauliTerm(1, {0: "X"})], 1), 50, seed=9)
        assert value == 1.0

    def test_mixed_basis_grouping_unbiased(self):
        rng = np.random.default_rng(12)
        h = PauliSum(
            [PauliTerm(0.8, {0: "Z"}), PauliTerm(-0.6, {0: "X"}), PauliTerm(0.3, {1: "Y"})], 2
        )
        state = random_state(2, rng)
        exact = expectation_exact(state, h)
        estimates = np.array(
            [expectation_shots(state, h, 400, seed=seed) for seed in range(400)]
        )
        standard_error = estimates.std(ddof=1) / np.sqrt(len(estimates))
        assert abs(estimates.mean() - exact) < 4 * standard_error + 1e-12

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(1)
        state = random_state(3, rng)
        h = PauliSum([PauliTerm(1.5, {0: "Z", 2: "Z"})], 3)
        assert expectation_shots(state, h, 200, seed=77) == expectation_shots(state, h, 200, seed=77)


class TestAssemblePrefix:
    def _raw(self):
        graph = GraphInstance("p", 3, ((0, 1), (1, 2)), 4, 0, 1.0)
        return graph, coloring_hamiltonian(graph)

    def test_full_union_equals_simplify(self):
        graph, h = self._raw()
        partition = partition_chronological(len(h.terms), 3)
        full = assemble_prefix(h, partition, 3)
        reference = simplify(h)
        assert [t.key for t in full.terms] == [t.key for t in reference.terms]
        assert all(
            a.coefficient == b.coefficient for a, b in zip(full.terms, reference.terms)
        )

    def test_singleton_prefix(self):
        _, h = self._raw()
        partition = partition_chronological(len(h.terms), len(h.terms))
        first = assemble_prefix(h, partition, 1)
        assert len(first.terms) == 1
        assert first.terms[0].key == h.terms[0].key

    def test_nodewise_path_graph_first_block_is_first_edge(self):
        graph, h = self._raw()
        partition = partition_nodewise(graph, h, 3)
        block1 = assemble_prefix(h, partition, 1)
        # edge (0,1) on qubits 0,1 (node 0) and 2,3 (node 1): k=4 simplified terms
        expected_keys = {
            (),
            ((0, "Z"), (2, "Z")),
            ((1, "Z"), (3, "Z")),
            ((0, "Z"), (1, "Z"), (2, "Z"), (3, "Z")),
        }
        assert {t.key for t in block1.terms} == expected_keys

    def test_prefix_monotone(self):
        rng = np.random.default_rng(5)
        _, h = self._raw()
        indices = list(range(len(h.terms)))
        rng.shuffle(indices)
        blocks = tuple(tuple(indices[i::3]) for i in range(3))
        partition = Partition(blocks)
        previous: set = set()
        for k in range(1, 4):
            current = {t.key for t in assemble_prefix(h, partition, k).terms}
            covered = set()
            for block in blocks[:k]:
                covered.update(block)
            assert previous <= covered
            previous = covered

    def test_overlapping_blocks_count_once(self):
        _, h = self._raw()
        partition = Partition((tuple(range(4)), tuple(range(2, len(h.terms)))))
        joined = assemble_prefix(h, partition, 2)
        assert [t.coefficient for t in joined.terms] == [
            t.coefficient for t in simplify(h).terms
        ]

    def test_k_out_of_range(self):
        _, h = self._raw()
        partition = partition_chronological(len(h.terms), 2)
        with pytest.raises(ValueError):
            assemble_prefix(h, partition, 0)
        with pytest.raises(ValueError):
            assemble_prefix(h, partition, 3)


class TestPartitionValidation:
    def test_coverage_required(self):
        with pytest.raises(ValueError, match="cover"):
            validate_partition(Partition(((0, 1),)), 3)

    def test_disjointness_flag(self):
        partition = Partition(((0, 1), (1, 2)))
        validate_partition(partition, 3)
        with pytest.raises(ValueError, match="overlap"):
            validate_partition(partition, 3, require_disjoint=True)


class TestSerialization:
    def test_round_trip(self):
        graph = GraphInstance("e", 2, ((0, 1),), 4, 0, 1.0)
        h = simplify(coloring_hamiltonian(graph))
        parsed = parse_pauli_sum(serialize_pauli_sum(h), h.n_qubits)
        assert [(t.coefficient, t.key) for t in parsed.terms] == [
            (t.coefficient, t.key) for t in h.terms
        ]

    def test_identity_term_rendering(self):
        text = serialize_pauli_sum(PauliSum([PauliTerm(4.0, {})], 2))
        assert text == "4.0 I\n"

    def test_parse_skips_comments_and_blanks(self):
        parsed = parse_pauli_sum("# header\n\n2.5 Z0 Z3\n", 4)
        assert parsed.terms == [PauliTerm(2.5, {0: "Z", 3: "Z"})]


class TestPauliTerm:
    def test_invalid_axis(self):
        with pytest.raises(ValueError):
            PauliTerm(1.0, {0: "Q"})

    def test_locality(self):
        assert PauliTerm(1.0, {0: "Z", 3: "Z"}).locality == 2
        assert PauliTerm(1.0, {}).locality == 0

    def test_register_bound_checked(self):
        with pytest.raises(ValueError):
            PauliSum([PauliTerm(1.0, {5: "Z"})], 3)


def test_derive_seed_is_deterministic_and_branching():
    assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    assert derive_seed(7, 1, 2) != derive_seed(7, 1, 3)
    assert derive_seed(7, 1) != derive_seed(8, 1)

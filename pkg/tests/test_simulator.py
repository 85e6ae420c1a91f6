"""
Unit tests for the statevector engine.
"""

from collections import Counter

import numpy as np
import pytest
from scipy.linalg import expm

from falqon_lab.exceptions import CapacityError, ParameterError, SerializationError
from falqon_lab.hamiltonian import DriverSpec, build_problem_diagonal
from falqon_lab.pauli import PauliSum
from falqon_lab.simulator import (
    InitialState,
    StateVector,
    apply_driver,
    apply_driver_hamiltonian,
    apply_layer,
    apply_problem_phase,
    driver_expectation,
    dump_state,
    expectation_diagonal,
    expectation_pauli_sum,
    fidelity,
    init_state,
    load_state,
    overlap,
    sample_bitstrings,
)
from tests.helpers import random_graph, random_state_amplitudes


def random_state(seed: int, n: int) -> StateVector:
    return StateVector(n, random_state_amplitudes(np.random.default_rng(seed), n))


class TestInitState:
    """Test state preparation."""

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_driver_ground_energy(self, n):
        state = init_state(n)
        assert state.norm() == pytest.approx(1.0)
        assert driver_expectation(state, DriverSpec.sum_x(n)) == pytest.approx(-n)

    def test_uniform_plus(self):
        state = init_state(2, InitialState.UNIFORM_PLUS)
        np.testing.assert_allclose(state.amplitudes, 0.5)
        assert driver_expectation(state, DriverSpec.sum_x(2)) == pytest.approx(2.0)

    def test_basis_uses_bit_order(self):
        state = init_state(2, "basis", bitstring="10")
        assert state.amplitudes[1] == 1

    def test_custom_requires_normalization(self):
        with pytest.raises(ParameterError, match="normalized"):
            init_state(1, "custom", amplitudes=np.array([1.0, 1.0]))
        state = init_state(1, "custom", amplitudes=np.array([0.6, 0.8j]))
        assert state.probabilities() == pytest.approx([0.36, 0.64])

    def test_invalid_requests(self):
        with pytest.raises(ParameterError):
            init_state(0)
        with pytest.raises(ParameterError):
            init_state(2, "basis", bitstring="1")
        with pytest.raises(ParameterError):
            init_state(2, "custom")
        with pytest.raises(ValueError):
            init_state(2, "nonsense")

    def test_capacity_from_environment(self, monkeypatch):
        monkeypatch.setenv("FALQON_LAB_MAX_STATEVECTOR_QUBITS", "4")
        with pytest.raises(CapacityError):
            init_state(5)


class TestUnitaries:
    """Test the phase, driver and layer against dense exponentials."""

    def test_problem_phase(self, weighted_square):
        diag = build_problem_diagonal(weighted_square)
        state = random_state(0, 4)
        expected = expm(-1j * 0.37 * diag.to_dense()) @ state.amplitudes
        np.testing.assert_allclose(
            apply_problem_phase(state, diag, 0.37).amplitudes, expected, atol=1e-12
        )

    @pytest.mark.parametrize("angle", [0.05, -0.8, 2.3])
    def test_sum_x_driver_is_exact(self, angle):
        driver = DriverSpec.sum_x(4)
        state = random_state(1, 4)
        expected = expm(-1j * angle * driver.to_dense()) @ state.amplitudes
        np.testing.assert_allclose(
            apply_driver(state, driver, angle).amplitudes, expected, atol=1e-12
        )

    def test_commuting_custom_driver_is_exact(self):
        driver = DriverSpec.from_terms(3, [(1.0, "ZZI"), (0.5, "IZZ"), (-0.3, "XXX")])
        state = random_state(2, 3)
        expected = expm(-1j * 0.9 * driver.to_dense()) @ state.amplitudes
        np.testing.assert_allclose(
            apply_driver(state, driver, 0.9).amplitudes, expected, atol=1e-12
        )

    def test_non_commuting_driver_is_second_order(self):
        driver = DriverSpec.from_terms(2, [(1.0, "XI"), (1.0, "ZI")])
        state = random_state(3, 2)
        errors = []
        for angle in (0.02, 0.01):
            expected = expm(-1j * angle * driver.to_dense()) @ state.amplitudes
            actual = apply_driver(state, driver, angle).amplitudes
            errors.append(np.linalg.norm(actual - expected))
        assert errors[1] < 1e-5
        # third-order local error: halving the angle divides it by about 8
        assert errors[0] / errors[1] == pytest.approx(8.0, rel=0.1)

    def test_layer_order(self, triangle):
        diag = build_problem_diagonal(triangle)
        driver = DriverSpec.sum_x(3)
        state = random_state(4, 3)
        beta, dt = 0.7, 0.1
        expected = (
            expm(-1j * beta * dt * driver.to_dense())
            @ expm(-1j * dt * diag.to_dense())
            @ state.amplitudes
        )
        np.testing.assert_allclose(
            apply_layer(state, diag, beta, dt).amplitudes, expected, atol=1e-12
        )

    def test_inputs_are_not_mutated(self, triangle):
        diag = build_problem_diagonal(triangle)
        state = random_state(5, 3)
        before = state.amplitudes.copy()
        apply_layer(state, diag, 0.4, 0.2)
        apply_driver(state, DriverSpec.sum_y(3), 0.3)
        np.testing.assert_array_equal(state.amplitudes, before)

    def test_zero_angle_is_identity(self):
        state = random_state(6, 2)
        out = apply_driver(state, DriverSpec.sum_x(2), 0.0)
        assert out is not state
        np.testing.assert_array_equal(out.amplitudes, state.amplitudes)

    def test_unitarity(self, prism):
        diag = build_problem_diagonal(prism)
        rng = np.random.default_rng(12)
        state = init_state(6)
        for beta in rng.uniform(-2.0, 2.0, size=3000):
            state = apply_layer(state, diag, beta, 0.05)
        assert state.norm() == pytest.approx(1.0, abs=1e-10)

    def test_inner_products_are_preserved(self, weighted_square):
        diag = build_problem_diagonal(weighted_square)
        a, b = random_state(13, 4), random_state(14, 4)
        before = overlap(a, b)
        for beta in np.linspace(-1.5, 1.5, 200):
            a = apply_layer(a, diag, beta, 0.03)
            b = apply_layer(b, diag, beta, 0.03)
        assert abs(overlap(a, b) - before) < 1e-10

    def test_layers_match_dense_exponentials(self):
        rng = np.random.default_rng(15)
        for case in range(100):
            n = int(rng.integers(2, 6))
            graph = random_graph(rng, n, weighted=bool(rng.integers(2)))
            diag = build_problem_diagonal(graph)
            driver = DriverSpec.sum_x(n)
            beta, dt = rng.uniform(-3.0, 3.0), rng.uniform(0.01, 0.5)
            state = random_state(100 + case, n)
            expected = (
                expm(-1j * beta * dt * driver.to_dense())
                @ expm(-1j * dt * diag.to_dense())
                @ state.amplitudes
            )
            out = apply_layer(state, diag, beta, dt)
            assert fidelity(out, StateVector(n, expected)) >= 1 - 1e-10

    def test_layer_rejects_bad_time_step(self, triangle):
        with pytest.raises(ParameterError):
            apply_layer(init_state(3), build_problem_diagonal(triangle), 0.1, 0.0)

    def test_dimension_mismatch(self, triangle):
        with pytest.raises(ParameterError, match="dimension mismatch"):
            apply_problem_phase(init_state(2), build_problem_diagonal(triangle), 0.1)


class TestExpectations:
    """Test expectation values against dense matrices."""

    def test_diagonal_expectation(self, weighted_square):
        diag = build_problem_diagonal(weighted_square)
        state = random_state(7, 4)
        expected = np.vdot(state.amplitudes, diag.to_dense() @ state.amplitudes).real
        assert expectation_diagonal(state, diag) == pytest.approx(expected)

    def test_pauli_sum_expectation(self):
        pauli = PauliSum.from_terms(3, [(0.5, "XYZ"), (-1.0, "ZZI"), (2.0, "IIX")])
        state = random_state(8, 3)
        expected = np.vdot(state.amplitudes, pauli.to_dense() @ state.amplitudes).real
        assert expectation_pauli_sum(state, pauli) == pytest.approx(expected)
        assert expectation_pauli_sum(state, PauliSum(n=3, terms=())) == 0.0

    @pytest.mark.parametrize("driver", [DriverSpec.sum_x(3), DriverSpec.sum_y(3)])
    def test_driver_hamiltonian(self, driver):
        state = random_state(9, 3)
        np.testing.assert_allclose(
            apply_driver_hamiltonian(state, driver), driver.to_dense() @ state.amplitudes
        )

    def test_fidelity(self):
        a = init_state(2, "basis", bitstring="00")
        b = init_state(2, InitialState.UNIFORM_PLUS)
        assert fidelity(a, b) == pytest.approx(0.25)
        assert fidelity(b, b) == pytest.approx(1.0)


class TestSampling:
    """Test sampling and debug dumps."""

    def test_sampling_is_seeded(self):
        state = random_state(10, 3)
        assert sample_bitstrings(state, 50, seed=4) == sample_bitstrings(state, 50, seed=4)

    def test_basis_state_samples(self):
        state = init_state(3, "basis", bitstring="110")
        assert Counter(sample_bitstrings(state, 20, seed=0)) == {"110": 20}

    def test_sample_frequencies(self):
        state = init_state(1, "custom", amplitudes=np.array([0.6, 0.8]))
        counts = Counter(sample_bitstrings(state, 20_000, seed=1))
        assert counts["1"] / 20_000 == pytest.approx(0.64, abs=0.02)

    def test_shots_must_be_positive(self):
        with pytest.raises(ParameterError):
            sample_bitstrings(init_state(1), 0)

    def test_dump_and_load(self, tmp_path):
        state = random_state(11, 3)
        path = tmp_path / "state.bin"
        dump_state(state, path)
        assert path.stat().st_size == 8 * 16
        np.testing.assert_array_equal(load_state(path).amplitudes, state.amplitudes)

    def test_load_rejects_bad_length(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(np.zeros(3, dtype="<c16").tobytes())
        with pytest.raises(SerializationError):
            load_state(path)

"""
Unit tests for the problem diagonal, drivers and the commutator observable.
"""

import numpy as np
import pytest

from falqon_lab.exceptions import CapacityError, ParameterError
from falqon_lab.graphs import Graph, cut_value, index_to_bitstring
from falqon_lab.hamiltonian import (
    DriverKind,
    DriverSpec,
    IsingDiagonal,
    build_commutator_observable,
    build_problem_diagonal,
    operator_norms,
    problem_pauli_sum,
)
from tests.helpers import random_graph


def dense_commutator(driver: np.ndarray, problem: np.ndarray) -> np.ndarray:
    return 1j * (driver @ problem - problem @ driver)


class TestProblemDiagonal:
    """Test the diagonal of H_p."""

    def test_values_are_negative_cuts(self, weighted_square):
        diag = build_problem_diagonal(weighted_square)
        for index in range(16):
            z = index_to_bitstring(index, 4)
            assert diag.values[index] == pytest.approx(-cut_value(weighted_square, z))

    def test_pauli_form_matches_diagonal(self, prism):
        dense = problem_pauli_sum(prism).to_dense()
        np.testing.assert_allclose(np.diag(dense).real, build_problem_diagonal(prism).values)
        np.testing.assert_allclose(dense - np.diag(np.diag(dense)), 0, atol=1e-12)

    def test_diagonal_is_read_only(self, triangle):
        diag = build_problem_diagonal(triangle)
        with pytest.raises(ValueError):
            diag.values[0] = 1.0

    def test_from_values(self):
        diag = IsingDiagonal.from_values([0.0, 1.0, 3.0, -7.0])
        assert diag.n == 2
        assert diag.norm == 7.0
        assert diag.values.min() == -7.0
        with pytest.raises(ParameterError):
            IsingDiagonal.from_values([0.0, 1.0, 2.0])

    def test_capacity(self, monkeypatch, prism):
        monkeypatch.setenv("FALQON_LAB_MAX_STATEVECTOR_QUBITS", "5")
        with pytest.raises(CapacityError):
            build_problem_diagonal(prism)


class TestDrivers:
    """Test driver construction and norms."""

    def test_sum_x(self):
        driver = DriverSpec.sum_x(3)
        assert driver.kind is DriverKind.SUM_X
        assert driver.norm() == 3.0
        assert [s for _, s in driver.pauli_sum.terms] == ["IIX", "IXI", "XII"]

    def test_custom_norm_uses_spectrum(self):
        driver = DriverSpec.from_terms(2, [(1.0, "XI"), (1.0, "ZI")])
        assert driver.norm() == pytest.approx(np.sqrt(2))
        assert driver.label == "custom"

    def test_custom_rejects_complex_and_mismatch(self):
        with pytest.raises(ParameterError):
            DriverSpec.from_terms(2, [(1j, "XI")])
        with pytest.raises(ParameterError):
            DriverSpec(n=3, kind=DriverKind.CUSTOM, custom=DriverSpec.sum_y(2).pauli_sum)
        with pytest.raises(ParameterError):
            DriverSpec(n=2, kind=DriverKind.CUSTOM)

    def test_to_dict(self):
        assert DriverSpec.sum_x(2).to_dict() == {"n": 2, "kind": "sum_x"}
        assert DriverSpec.sum_y(1).to_dict()["terms"] == [[1.0, "Y"]]


class TestCommutatorObservable:
    """Test i[H_d, H_p] against dense matrices."""

    @pytest.mark.parametrize("seed", range(4))
    def test_sum_x_matches_dense(self, seed):
        graph = random_graph(np.random.default_rng(seed), 4, weighted=True)
        observable = build_commutator_observable(graph)
        expected = dense_commutator(
            DriverSpec.sum_x(4).to_dense(), build_problem_diagonal(graph).to_dense()
        )
        np.testing.assert_allclose(observable.to_dense(), expected, atol=1e-12)

    def test_sum_x_term_count(self, prism):
        assert build_commutator_observable(prism).num_terms == 2 * prism.num_edges

    @pytest.mark.parametrize(
        "driver",
        [
            DriverSpec.sum_y(3),
            DriverSpec.from_terms(3, [(1.0, "XXI"), (0.5, "IYZ"), (-0.25, "XII")]),
        ],
    )
    def test_custom_driver_matches_dense(self, driver):
        graph = Graph.from_edges(3, [(0, 1, 0.4), (1, 2), (0, 2, 0.8)])
        observable = build_commutator_observable(graph, driver)
        expected = dense_commutator(driver.to_dense(), build_problem_diagonal(graph).to_dense())
        np.testing.assert_allclose(observable.to_dense(), expected, atol=1e-12)

    def test_observable_is_traceless_and_hermitian(self, k33):
        observable = build_commutator_observable(k33)
        assert "I" * 6 not in {string for _, string in observable.terms}
        dense = observable.to_dense()
        np.testing.assert_allclose(dense, dense.conj().T)

    def test_driver_size_mismatch(self, triangle):
        with pytest.raises(ParameterError):
            build_commutator_observable(triangle, DriverSpec.sum_x(4))


class TestOperatorNorms:
    """Test (n_p, n_d)."""

    def test_norms(self, prism):
        assert operator_norms(prism) == (7.0, 6.0)

    def test_norms_match_dense_spectra(self, weighted_square):
        driver = DriverSpec.from_terms(4, [(1.0, "XXII"), (0.3, "IZIZ")])
        n_p, n_d = operator_norms(weighted_square, driver)
        assert n_p == pytest.approx(np.abs(np.linalg.eigvalsh(
            build_problem_diagonal(weighted_square).to_dense())).max())
        assert n_d == pytest.approx(np.abs(np.linalg.eigvalsh(driver.to_dense())).max())

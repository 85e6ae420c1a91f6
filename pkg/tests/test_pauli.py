"""
Unit tests for Pauli strings and Pauli sums.
"""

import numpy as np
import pytest

from falqon_lab.exceptions import ParameterError, SerializationError
from falqon_lab.pauli import (
    PauliSum,
    apply_pauli_string,
    multiply_strings,
    strings_commute,
)
from tests.helpers import random_state_amplitudes


def basis(n: int, index: int) -> np.ndarray:
    state = np.zeros(1 << n, dtype=complex)
    state[index] = 1
    return state


class TestPauliStrings:
    """Test single-string application and algebra."""

    def test_phase_convention(self):
        np.testing.assert_allclose(apply_pauli_string("Y", basis(1, 0)), 1j * basis(1, 1))
        np.testing.assert_allclose(apply_pauli_string("Y", basis(1, 1)), -1j * basis(1, 0))
        np.testing.assert_allclose(apply_pauli_string("Z", basis(1, 1)), -basis(1, 1))

    def test_letter_j_acts_on_bit_j(self):
        # "XI" flips qubit 0, the least significant bit
        np.testing.assert_allclose(apply_pauli_string("XI", basis(2, 0)), basis(2, 1))
        np.testing.assert_allclose(apply_pauli_string("IX", basis(2, 0)), basis(2, 2))

    @pytest.mark.parametrize("string", ["XYZ", "ZZI", "YIY", "IXI"])
    def test_matches_dense_matrix(self, string):
        rng = np.random.default_rng(0)
        psi = random_state_amplitudes(rng, 3)
        dense = PauliSum.from_terms(3, [(1.0, string)]).to_dense()
        np.testing.assert_allclose(apply_pauli_string(string, psi), dense @ psi, atol=1e-12)

    def test_multiplication(self):
        assert multiply_strings("X", "Y") == (1j, "Z")
        assert multiply_strings("XZ", "YY") == (1, "ZX")
        assert multiply_strings("ZZ", "ZZ") == (1, "II")

    def test_commutation(self):
        assert strings_commute("XX", "ZZ")
        assert not strings_commute("XI", "ZI")
        assert strings_commute("XI", "IZ")


class TestPauliSum:
    """Test construction, application and commutators of Pauli sums."""

    def test_from_terms_merges_and_drops_zeros(self):
        pauli = PauliSum.from_terms(2, [(1.0, "XI"), (0.5, "XI"), (1.0, "ZZ"), (-1.0, "ZZ")])
        assert pauli.terms == ((1.5, "XI"),)

    def test_rejects_complex_coefficients(self):
        with pytest.raises(ParameterError, match="Hermitian"):
            PauliSum.from_terms(1, [(1j, "X")])

    def test_rejects_malformed_strings(self):
        with pytest.raises(ParameterError):
            PauliSum(n=2, terms=((1.0, "XQ"),))
        with pytest.raises(ParameterError):
            PauliSum(n=2, terms=((1.0, "X"),))

    def test_apply_matches_dense(self):
        rng = np.random.default_rng(1)
        pauli = PauliSum.from_terms(3, [(0.3, "XIZ"), (-1.2, "YYI"), (0.7, "IIZ"), (0.1, "III")])
        psi = random_state_amplitudes(rng, 3)
        np.testing.assert_allclose(pauli.apply(psi), pauli.to_dense() @ psi, atol=1e-12)

    def test_dense_is_hermitian(self):
        pauli = PauliSum.from_terms(2, [(0.4, "XY"), (1.0, "YZ"), (-0.2, "ZI")])
        dense = pauli.to_dense()
        np.testing.assert_allclose(dense, dense.conj().T)

    def test_term_expectations(self):
        rng = np.random.default_rng(2)
        pauli = PauliSum.from_terms(2, [(1.0, "XY"), (2.0, "ZZ")])
        psi = random_state_amplitudes(rng, 2)
        for (coeff, string), value in zip(pauli.terms, pauli.term_expectations(psi)):
            single = PauliSum.from_terms(2, [(1.0, string)]).to_dense()
            assert value == pytest.approx(np.vdot(psi, single @ psi).real)

    def test_commutator_matches_dense(self):
        a = PauliSum.from_terms(3, [(1.0, "XII"), (0.5, "IYI"), (-0.3, "ZZX")])
        b = PauliSum.from_terms(3, [(0.7, "ZZI"), (1.1, "IZZ"), (0.2, "XXX")])
        expected = 1j * (a.to_dense() @ b.to_dense() - b.to_dense() @ a.to_dense())
        np.testing.assert_allclose(a.commutator(b).to_dense(), expected, atol=1e-12)

    def test_commuting_sums_give_empty_commutator(self):
        a = PauliSum.from_terms(2, [(1.0, "ZI")])
        b = PauliSum.from_terms(2, [(1.0, "ZZ")])
        assert a.commutator(b).num_terms == 0

    def test_one_norm(self):
        pauli = PauliSum.from_terms(2, [(-2.0, "XX"), (0.5, "II")])
        assert pauli.one_norm == pytest.approx(2.5)

    def test_text_round_trip(self):
        pauli = PauliSum.from_terms(3, [(0.1, "XYZ"), (-2.5, "IIZ")])
        assert PauliSum.parse(pauli.format()) == pauli

    def test_parse_errors(self):
        with pytest.raises(SerializationError):
            PauliSum.parse("")
        with pytest.raises(SerializationError):
            PauliSum.parse("one XX\n")

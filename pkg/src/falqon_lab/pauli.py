"""
Weighted Pauli sums with bit-indexed application.

Letter j of a Pauli string acts on qubit j; qubit 0 is the least significant
bit of the basis-state index. Phase convention: Y|0> = i|1>, Y|1> = -i|0>.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any

import numpy as np

from falqon_lab.exceptions import ParameterError, SerializationError

_LETTERS = frozenset("IXYZ")

# Single-qubit products: (a, b) -> (phase, letter) with a·b = phase·letter
_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}  # fmt: skip

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@lru_cache(maxsize=32)
def basis_indices(n: int) -> np.ndarray:
    """Cached ``arange(2**n)`` used for bit arithmetic on basis indices."""
    indices = np.arange(1 << n, dtype=np.int64)
    indices.flags.writeable = False
    return indices


def _masks(string: str) -> tuple[int, int, int]:
    """(flip mask, sign mask, number of Y letters) of a Pauli string."""
    flip = sign = 0
    n_y = 0
    for j, letter in enumerate(string):
        if letter in "XY":
            flip |= 1 << j
        if letter in "YZ":
            sign |= 1 << j
        if letter == "Y":
            n_y += 1
    return flip, sign, n_y


def pauli_phases(string: str) -> tuple[int, np.ndarray]:
    """
    Flip mask and per-index phase of P|z> = phase[z] |z ^ flip>.

    The phase is i^(#Y) times (-1)^popcount(z & sign).
    """
    flip, sign, n_y = _masks(string)
    indices = basis_indices(len(string))
    parity = np.bitwise_count(indices & sign) & 1
    phases = (1j**n_y) * (1 - 2 * parity.astype(float))
    return flip, phases


def apply_pauli_string(string: str, amplitudes: np.ndarray) -> np.ndarray:
    """Return P|psi> for a single Pauli string without forming a matrix."""
    flip, phases = pauli_phases(string)
    out = np.empty_like(amplitudes, dtype=complex)
    out[basis_indices(len(string)) ^ flip] = phases * amplitudes
    return out


def multiply_strings(a: str, b: str) -> tuple[complex, str]:
    """Product a·b = phase · c of two Pauli strings."""
    phase: complex = 1
    letters = []
    for x, y in zip(a, b):
        p, letter = _PRODUCT[(x, y)]
        phase *= p
        letters.append(letter)
    return phase, "".join(letters)


def strings_commute(a: str, b: str) -> bool:
    anticommuting = sum(1 for x, y in zip(a, b) if "I" not in (x, y) and x != y)
    return anticommuting % 2 == 0


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings with merged duplicates and no zeros."""

    n: int
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for coeff, string in self.terms:
            if len(string) != self.n or set(string) - _LETTERS:
                raise ParameterError(
                    "Pauli string must have one I/X/Y/Z letter per qubit",
                    {"string": string, "n": self.n},
                )
            if string in seen:
                raise ParameterError("duplicate Pauli string", {"string": string})
            if coeff == 0:
                raise ParameterError("zero coefficient", {"string": string})
            seen.add(string)

    @classmethod
    def from_terms(
        cls, n: int, terms: Iterable[tuple[complex, str]], atol: float = 0.0
    ) -> "PauliSum":
        """Merge duplicate strings and drop zeros; complex input must be real."""
        merged: dict[str, complex] = {}
        for coeff, string in terms:
            merged[string] = merged.get(string, 0) + coeff
        kept: list[tuple[float, str]] = []
        for string, coeff in sorted(merged.items()):
            if abs(complex(coeff).imag) > max(atol, 1e-12):
                raise ParameterError(
                    "Pauli sum is not Hermitian (complex coefficient)",
                    {"string": string, "coefficient": str(coeff)},
                )
            real = float(complex(coeff).real)
            if abs(real) > atol and real != 0.0:
                kept.append((real, string))
        return cls(n=n, terms=tuple(kept))

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    @property
    def one_norm(self) -> float:
        """Sum of |coefficients|, an upper bound on the spectral norm."""
        return float(np.abs(self.coefficients).sum())

    @cached_property
    def _compiled(self) -> list[tuple[float, int, np.ndarray]]:
        return [(c, *pauli_phases(s)) for c, s in self.terms]

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Return (sum_j a_j P_j)|psi>."""
        out = np.zeros(1 << self.n, dtype=complex)
        indices = basis_indices(self.n)
        for coeff, flip, phases in self._compiled:
            out[indices ^ flip] += coeff * phases * amplitudes
        return out

    def term_expectations(self, amplitudes: np.ndarray) -> np.ndarray:
        """<psi|P_j|psi> for each term (real for Pauli strings)."""
        indices = basis_indices(self.n)
        values = np.empty(self.num_terms, dtype=float)
        for t, (_, flip, phases) in enumerate(self._compiled):
            values[t] = float(np.vdot(amplitudes[indices ^ flip], phases * amplitudes).real)
        return values

    def commutator(self, other: "PauliSum") -> "PauliSum":
        """The Pauli sum i[self, other]."""
        if other.n != self.n:
            raise ParameterError("qubit counts differ", {"a": self.n, "b": other.n})
        terms: list[tuple[complex, str]] = []
        for a, p in self.terms:
            for b, q in other.terms:
                if strings_commute(p, q):
                    continue
                phase, string = multiply_strings(p, q)
                # [P, Q] = 2PQ when P and Q anticommute
                terms.append((1j * 2 * a * b * phase, string))
        return PauliSum.from_terms(self.n, terms, atol=1e-14)

    def to_dense(self) -> np.ndarray:
        """Dense matrix via Kronecker products (qubit 0 is the rightmost factor)."""
        dim = 1 << self.n
        matrix = np.zeros((dim, dim), dtype=complex)
        for coeff, string in self.terms:
            factor = np.ones((1, 1), dtype=complex)
            for letter in reversed(string):
                factor = np.kron(factor, _SINGLE_QUBIT[letter])
            matrix += coeff * factor
        return matrix

    def format(self) -> str:
        """Text serialization: one ``coeff letters`` term per line."""
        return "".join(f"{coeff:.17g} {string}\n" for coeff, string in self.terms)

    @classmethod
    def parse(cls, text: str) -> "PauliSum":
        terms: list[tuple[complex, str]] = []
        n: int | None = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            try:
                coeff_text, string = line.split()
                coeff = float(coeff_text)
            except ValueError as e:
                raise SerializationError("malformed Pauli term", {"line": raw}) from e
            if n is None:
                n = len(string)
            terms.append((coeff, string))
        if n is None:
            raise SerializationError("empty Pauli sum text")
        return cls.from_terms(n, terms)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "terms": [[c, s] for c, s in self.terms]}

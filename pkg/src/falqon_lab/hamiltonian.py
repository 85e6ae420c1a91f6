"""Problem diagonal, drivers, the commutator observable and operator norms."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.linalg import eigvalsh

from falqon_lab.config import get_settings
from falqon_lab.exceptions import ParameterError, require_capacity
from falqon_lab.graphs import Graph, cut_values
from falqon_lab.pauli import PauliSum, basis_indices

logger = logging.getLogger(__name__)

# Dense eigensolves for custom driver norms stay below this size
_DENSE_NORM_QUBITS = 12


# ——— Domain types ———


@dataclass(frozen=True, eq=False)
class IsingDiagonal:
    """values[z] = <z|H_p|z> for every basis state z."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (1 << self.n,):
            raise ParameterError(
                "diagonal length must be 2**n",
                {"n": self.n, "length": int(self.values.size)},
            )
        self.values.flags.writeable = False

    @classmethod
    def from_values(cls, values: np.ndarray) -> "IsingDiagonal":
        """Wrap an arbitrary real diagonal (synthetic instances)."""
        values = np.array(values, dtype=float)
        n = int(values.size).bit_length() - 1
        if values.size != 1 << n:
            raise ParameterError("diagonal length must be a power of two")
        return cls(n=n, values=values)

    @property
    def norm(self) -> float:
        """Exact spectral norm of a diagonal operator."""
        return float(np.abs(self.values).max())

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.values * amplitudes

    def to_dense(self) -> np.ndarray:
        return np.diag(self.values).astype(complex)


class DriverKind(str, Enum):
    """Driver Hamiltonian families."""

    SUM_X = "sum_x"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DriverSpec:
    """Mixing Hamiltonian H_d: the standard sum of X, or a custom Pauli sum."""

    n: int
    kind: DriverKind = DriverKind.SUM_X
    custom: PauliSum | None = field(default=None)

    def __post_init__(self) -> None:
        if self.kind is DriverKind.CUSTOM:
            if self.custom is None:
                raise ParameterError("custom driver needs a Pauli sum")
            if self.custom.n != self.n:
                raise ParameterError(
                    "driver qubit count mismatch", {"n": self.n, "pauli_n": self.custom.n}
                )

    @classmethod
    def sum_x(cls, n: int) -> "DriverSpec":
        return cls(n=n)

    @classmethod
    def sum_y(cls, n: int) -> "DriverSpec":
        return cls.from_pauli_sum(
            PauliSum.from_terms(n, [(1.0, "I" * j + "Y" + "I" * (n - j - 1)) for j in range(n)])
        )

    @classmethod
    def from_pauli_sum(cls, pauli: PauliSum) -> "DriverSpec":
        return cls(n=pauli.n, kind=DriverKind.CUSTOM, custom=pauli)

    @classmethod
    def from_terms(cls, n: int, terms: list[tuple[complex, str]]) -> "DriverSpec":
        """Custom driver from raw terms; complex coefficients are rejected."""
        return cls.from_pauli_sum(PauliSum.from_terms(n, terms))

    @property
    def pauli_sum(self) -> PauliSum:
        if self.kind is DriverKind.SUM_X:
            return PauliSum.from_terms(
                self.n,
                [(1.0, "I" * j + "X" + "I" * (self.n - j - 1)) for j in range(self.n)],
            )
        assert self.custom is not None
        return self.custom

    @property
    def label(self) -> str:
        return self.kind.value

    def to_dense(self) -> np.ndarray:
        return self.pauli_sum.to_dense()

    def norm(self) -> float:
        """Spectral norm; the one-norm bound is used above the dense ceiling."""
        if self.kind is DriverKind.SUM_X:
            return float(self.n)
        assert self.custom is not None
        if self.n <= _DENSE_NORM_QUBITS:
            spectrum = eigvalsh(self.custom.to_dense())
            return float(np.abs(spectrum).max())
        return self.custom.one_norm

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"n": self.n, "kind": self.kind.value}
        if self.custom is not None:
            data["terms"] = self.custom.to_dict()["terms"]
        return data


# ——— Builders ———


def build_problem_diagonal(graph: Graph) -> IsingDiagonal:
    """
    Diagonal of H_p = -sum_(j,k) w_jk (1 - Z_j Z_k) / 2, i.e. values[z] = -cut(z).

    For unweighted graphs this is exactly -sum (1 - w Z_j Z_k) / 2.
    """
    require_capacity(graph.n, get_settings().max_statevector_qubits, "build_problem_diagonal")
    values = -cut_values(graph, basis_indices(graph.n))
    return IsingDiagonal(n=graph.n, values=values)


def problem_pauli_sum(graph: Graph) -> PauliSum:
    """H_p as a Pauli sum (identity offset plus weighted ZZ terms)."""
    terms: list[tuple[complex, str]] = [(-0.5 * graph.total_weight, "I" * graph.n)]
    for j, k, w in graph.edges:
        letters = ["I"] * graph.n
        letters[j] = letters[k] = "Z"
        terms.append((0.5 * w, "".join(letters)))
    return PauliSum.from_terms(graph.n, terms)


def _two_qubit_string(n: int, j: int, a: str, k: int, b: str) -> str:
    letters = ["I"] * n
    letters[j], letters[k] = a, b
    return "".join(letters)


def build_commutator_observable(graph: Graph, driver: DriverSpec | None = None) -> PauliSum:
    """The Pauli expansion of i[H_d, H_p]."""
    driver = driver or DriverSpec.sum_x(graph.n)
    if driver.n != graph.n:
        raise ParameterError(
            "driver and graph qubit counts differ", {"driver": driver.n, "graph": graph.n}
        )

    if driver.kind is DriverKind.SUM_X:
        terms: list[tuple[complex, str]] = []
        for j, k, w in graph.edges:
            terms.append((w, _two_qubit_string(graph.n, j, "Y", k, "Z")))
            terms.append((w, _two_qubit_string(graph.n, j, "Z", k, "Y")))
        observable = PauliSum.from_terms(graph.n, terms)
    else:
        observable = driver.pauli_sum.commutator(problem_pauli_sum(graph))

    logger.debug(f"Commutator observable has {observable.num_terms} terms")
    return observable


def operator_norms(graph: Graph, driver: DriverSpec | None = None) -> tuple[float, float]:
    """(n_p, n_d): spectral norms of H_p and H_d."""
    driver = driver or DriverSpec.sum_x(graph.n)
    return build_problem_diagonal(graph).norm, driver.norm()

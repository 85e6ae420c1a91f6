"""
Statevector engine: preparation, Trotter layers, expectations and sampling.

Every operation returns a new ``StateVector``; inputs are never mutated.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np

from falqon_lab.config import get_settings
from falqon_lab.exceptions import ParameterError, SerializationError, require_capacity
from falqon_lab.graphs import bitstring_to_index, index_to_bitstring
from falqon_lab.hamiltonian import DriverKind, DriverSpec, IsingDiagonal
from falqon_lab.pauli import PauliSum, apply_pauli_string, basis_indices, strings_commute

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10


@dataclass
class StateVector:
    """Pure state of n qubits; amplitudes indexed by basis-state integer."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n,):
            raise ParameterError(
                "amplitude count must be 2**n",
                {"n": self.n, "length": int(self.amplitudes.size)},
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())


class InitialState(str, Enum):
    """Preparations accepted by ``init_state``."""

    DRIVER_GROUND = "driver_ground"
    UNIFORM_PLUS = "uniform_plus"
    BASIS = "basis"
    CUSTOM = "custom"


def init_state(
    n: int,
    kind: InitialState | str = InitialState.DRIVER_GROUND,
    bitstring: str | None = None,
    amplitudes: np.ndarray | None = None,
) -> StateVector:
    """
    Prepare |psi_0>.

    ``driver_ground`` is the tensor power of (|0> - |1>)/sqrt(2), the ground
    state of sum_j X_j with energy -n.
    """
    if n < 1:
        raise ParameterError("need at least one qubit", {"n": n})
    require_capacity(n, get_settings().max_statevector_qubits, "init_state")
    kind = InitialState(kind)

    if kind is InitialState.DRIVER_GROUND:
        parity = np.bitwise_count(basis_indices(n)) & 1
        amps = (1 - 2 * parity.astype(float)) * 2 ** (-n / 2)
        return StateVector(n, amps.astype(complex))
    if kind is InitialState.UNIFORM_PLUS:
        return StateVector(n, np.full(1 << n, 2 ** (-n / 2), dtype=complex))
    if kind is InitialState.BASIS:
        if bitstring is None or len(bitstring) != n:
            raise ParameterError("basis state needs an n-bit string", {"bitstring": bitstring})
        amps = np.zeros(1 << n, dtype=complex)
        amps[bitstring_to_index(bitstring)] = 1.0
        return StateVector(n, amps)

    if amplitudes is None:
        raise ParameterError("custom state needs amplitudes")
    state = StateVector(n, np.array(amplitudes, dtype=complex))
    if abs(state.norm() - 1.0) > NORM_TOLERANCE:
        raise ParameterError("custom amplitudes are not normalized", {"norm": state.norm()})
    return state


def _check_dims(state: StateVector, n: int, what: str) -> None:
    if state.n != n:
        raise ParameterError(f"{what}: dimension mismatch", {"state_n": state.n, "n": n})


# ——— Unitaries ———


def apply_problem_phase(state: StateVector, diag: IsingDiagonal, angle: float) -> StateVector:
    """e^(-i angle H_p) as one fused per-amplitude phase."""
    _check_dims(state, diag.n, "apply_problem_phase")
    return StateVector(state.n, np.exp(-1j * angle * diag.values) * state.amplitudes)


def _rotate_all_x(amplitudes: np.ndarray, n: int, theta: float) -> np.ndarray:
    """Tensor product of e^(-i theta X) on every qubit."""
    c, s = np.cos(theta), np.sin(theta)
    out = amplitudes.copy()
    for j in range(n):
        view = out.reshape(-1, 2, 1 << j)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 - 1j * s * a1
        view[:, 1, :] = c * a1 - 1j * s * a0
    return out


@lru_cache(maxsize=64)
def _terms_commute(pauli: PauliSum) -> bool:
    strings = [s for _, s in pauli.terms]
    return all(
        strings_commute(a, b) for i, a in enumerate(strings) for b in strings[i + 1 :]
    )


def _rotate_pauli(amplitudes: np.ndarray, string: str, theta: float) -> np.ndarray:
    """e^(-i theta P) = cos(theta) I - i sin(theta) P for a Pauli string P."""
    return np.cos(theta) * amplitudes - 1j * np.sin(theta) * apply_pauli_string(
        string, amplitudes
    )


def apply_driver(state: StateVector, driver: DriverSpec, angle: float) -> StateVector:
    """
    e^(-i angle H_d).

    Sum-of-X drivers are applied exactly as independent single-qubit
    rotations. Custom drivers use a symmetric second-order product formula
    over their terms, which is exact when all terms commute.
    """
    _check_dims(state, driver.n, "apply_driver")
    if angle == 0.0:
        return state.copy()
    if driver.kind is DriverKind.SUM_X:
        return StateVector(state.n, _rotate_all_x(state.amplitudes, state.n, angle))

    pauli = driver.pauli_sum
    amps = state.amplitudes
    if _terms_commute(pauli):
        for coeff, string in pauli.terms:
            amps = _rotate_pauli(amps, string, angle * coeff)
        return StateVector(state.n, amps)

    for coeff, string in pauli.terms:
        amps = _rotate_pauli(amps, string, 0.5 * angle * coeff)
    for coeff, string in reversed(pauli.terms):
        amps = _rotate_pauli(amps, string, 0.5 * angle * coeff)
    return StateVector(state.n, amps)


def apply_layer(
    state: StateVector,
    diag: IsingDiagonal,
    beta: float,
    dt: float,
    driver: DriverSpec | None = None,
) -> StateVector:
    """One FALQON layer U_d(beta) U_p = e^(-i beta H_d dt) e^(-i H_p dt)."""
    if dt <= 0:
        raise ParameterError("time step must be positive", {"dt": dt})
    _check_dims(state, diag.n, "apply_layer")
    driver = driver or DriverSpec.sum_x(state.n)
    return apply_driver(apply_problem_phase(state, diag, dt), driver, beta * dt)


# ——— Expectations ———


def apply_driver_hamiltonian(state: StateVector, driver: DriverSpec) -> np.ndarray:
    """H_d|psi> as a raw amplitude array."""
    _check_dims(state, driver.n, "apply_driver_hamiltonian")
    if driver.kind is DriverKind.SUM_X:
        indices = basis_indices(state.n)
        out = np.zeros_like(state.amplitudes)
        for j in range(state.n):
            out += state.amplitudes[indices ^ (1 << j)]
        return out
    return driver.pauli_sum.apply(state.amplitudes)


def expectation_diagonal(state: StateVector, diag: IsingDiagonal) -> float:
    """E_p = sum_z values[z] |psi_z|^2."""
    _check_dims(state, diag.n, "expectation_diagonal")
    return float(np.dot(diag.values, state.probabilities()))


def expectation_pauli_sum(state: StateVector, obs: PauliSum) -> float:
    """sum_j alpha_j <psi|P_j|psi> by bit-indexed application of each string."""
    _check_dims(state, obs.n, "expectation_pauli_sum")
    if obs.num_terms == 0:
        return 0.0
    return float(np.dot(obs.coefficients, obs.term_expectations(state.amplitudes)))


def driver_expectation(state: StateVector, driver: DriverSpec) -> float:
    return float(np.vdot(state.amplitudes, apply_driver_hamiltonian(state, driver)).real)


def overlap(a: StateVector, b: StateVector) -> complex:
    _check_dims(a, b.n, "overlap")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(overlap(a, b)) ** 2


# ——— Sampling ———


def sample_bitstrings(state: StateVector, shots: int, seed: int | None = None) -> list[str]:
    """Independent draws from p(z) = |psi_z|^2, in draw order."""
    if shots < 1:
        raise ParameterError("shots must be >= 1", {"shots": shots})
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    return [index_to_bitstring(int(i), state.n) for i in draws]


# ——— Debug dumps ———


def dump_state(state: StateVector, path: Path) -> None:
    """Little-endian (real, imaginary) float64 pairs in basis-index order."""
    Path(path).write_bytes(state.amplitudes.astype("<c16").tobytes())


def load_state(path: Path) -> StateVector:
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<c16")
    n = int(raw.size).bit_length() - 1
    if raw.size == 0 or raw.size != 1 << n:
        raise SerializationError("state dump length is not a power of two", {"path": str(path)})
    return StateVector(n, raw.astype(complex))

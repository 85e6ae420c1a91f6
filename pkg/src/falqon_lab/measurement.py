"""Estimators for commutator expectations under finite sampling."""

import logging
from enum import Enum
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.linalg import eigh

from falqon_lab.config import get_settings
from falqon_lab.exceptions import ParameterError, require_capacity
from falqon_lab.pauli import PauliSum
from falqon_lab.simulator import StateVector, expectation_pauli_sum

logger = logging.getLogger(__name__)


class EstimatorMode(str, Enum):
    """Noise models for estimating <obs>."""

    EXACT = "exact"
    PAULI_SHOTS = "pauli_shots"
    FULL_MULTINOMIAL = "full_multinomial"


class EstimatorConfig(BaseModel):
    """
    Estimator selection.

    ``shots`` is m per Pauli term in ``pauli_shots`` mode and the per-call
    total m in ``full_multinomial`` mode.
    """

    mode: EstimatorMode = Field(default=EstimatorMode.EXACT)
    shots: int | None = Field(default=None, description="Samples m (ignored when exact)")
    seed: int = Field(default=0, description="Base seed of the per-call RNG streams")

    @model_validator(mode="after")
    def _check_shots(self) -> "EstimatorConfig":
        if self.mode is not EstimatorMode.EXACT and (self.shots is None or self.shots < 1):
            raise ValueError("sampling estimators need shots >= 1")
        return self

    @classmethod
    def exact(cls) -> "EstimatorConfig":
        return cls()

    @classmethod
    def pauli_shots(cls, m_per_term: int, seed: int = 0) -> "EstimatorConfig":
        return cls(mode=EstimatorMode.PAULI_SHOTS, shots=m_per_term, seed=seed)

    @classmethod
    def full_multinomial(cls, m: int, seed: int = 0) -> "EstimatorConfig":
        return cls(mode=EstimatorMode.FULL_MULTINOMIAL, shots=m, seed=seed)


@lru_cache(maxsize=8)
def observable_spectrum(obs: PauliSum) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of the dense observable."""
    require_capacity(obs.n, get_settings().max_multinomial_qubits, "full_multinomial estimator")
    logger.debug(f"Diagonalizing {obs.num_terms}-term observable on {obs.n} qubits")
    eigenvalues, eigenvectors = eigh(obs.to_dense())
    return eigenvalues, eigenvectors


class ObservableEstimator:
    """Stateless-per-call estimator of one observable; RNG stream = (seed, ordinal)."""

    def __init__(self, obs: PauliSum, config: EstimatorConfig | None = None) -> None:
        self.obs = obs
        self.config = config or EstimatorConfig()
        if self.config.mode is EstimatorMode.FULL_MULTINOMIAL:
            observable_spectrum(obs)

    def _rng(self, ordinal: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, ordinal])

    def estimate(self, state: StateVector, ordinal: int = 0) -> float:
        if state.n != self.obs.n:
            raise ParameterError(
                "estimator dimension mismatch", {"state_n": state.n, "obs_n": self.obs.n}
            )
        mode = self.config.mode
        if mode is EstimatorMode.EXACT:
            return expectation_pauli_sum(state, self.obs)

        assert self.config.shots is not None
        m = self.config.shots
        rng = self._rng(ordinal)

        if mode is EstimatorMode.PAULI_SHOTS:
            if self.obs.num_terms == 0:
                return 0.0
            means = self.obs.term_expectations(state.amplitudes)
            p_plus = np.clip((1.0 + means) / 2.0, 0.0, 1.0)
            successes = rng.binomial(m, p_plus)
            estimates = 2.0 * successes / m - 1.0
            return float(np.dot(self.obs.coefficients, estimates))

        eigenvalues, eigenvectors = observable_spectrum(self.obs)
        probs = np.abs(eigenvectors.conj().T @ state.amplitudes) ** 2
        probs = probs / probs.sum()
        counts = rng.multinomial(m, probs)
        return float(np.dot(counts, eigenvalues) / m)


def estimate_observable(
    state: StateVector, obs: PauliSum, config: EstimatorConfig, ordinal: int = 0
) -> float:
    """Unbiased estimate of <psi|obs|psi> under the configured noise model."""
    return ObservableEstimator(obs, config).estimate(state, ordinal)

"""Parameter and result models for QAOA optimization."""

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator


class QaoaParams(BaseModel):
    """Angles of U_d(beta_l) U_p(gamma_l) ... U_d(beta_1) U_p(gamma_1)."""

    gammas: list[float]
    betas: list[float]

    @model_validator(mode="after")
    def _equal_lengths(self) -> "QaoaParams":
        if len(self.gammas) != len(self.betas):
            raise ValueError("gammas and betas must have equal length")
        return self

    @property
    def layers(self) -> int:
        return len(self.gammas)

    def to_vector(self) -> np.ndarray:
        """[gamma_1..gamma_l, beta_1..beta_l]"""
        return np.array(self.gammas + self.betas, dtype=float)

    @classmethod
    def from_vector(cls, x: Sequence[float] | np.ndarray) -> "QaoaParams":
        values = [float(v) for v in x]
        if len(values) % 2:
            raise ValueError("parameter vector must have even length")
        half = len(values) // 2
        return cls(gammas=values[:half], betas=values[half:])

    @classmethod
    def zeros(cls, layers: int) -> "QaoaParams":
        return cls(gammas=[0.0] * layers, betas=[0.0] * layers)


class BfgsOptions(BaseModel):
    """Quasi-Newton settings; Armijo backtracking halves the step each retry."""

    max_iters: int = Field(default=500, ge=1)
    grad_tol: float = Field(default=1e-6, gt=0)
    armijo_c: float = Field(default=1e-4, gt=0, lt=1)
    shrink: float = Field(default=0.5, gt=0, lt=1)
    max_backtracks: int = Field(default=60, ge=1)


class IterationRecord(BaseModel):
    iter: int
    energy: float
    grad_norm: float
    step: float


class OptResult(BaseModel):
    """Outcome of one ``bfgs_minimize`` call."""

    x: list[float]
    energy: float
    initial_energy: float
    iterations: int
    gradient_norm: float
    converged: bool
    history: list[IterationRecord] = Field(default_factory=list)
    r_A: float | None = Field(default=None, description="Final approximation ratio")
    phi: float | None = Field(default=None, description="Final success probability")

    @property
    def params(self) -> QaoaParams:
        return QaoaParams.from_vector(self.x)


class FalqonPlusResult(OptResult):
    """Optimization seeded from a FALQON schedule, with before/after metrics."""

    seed_params: QaoaParams
    falqon_r_A: float
    falqon_phi: float


class MultistartStats(BaseModel):
    """Order statistics of r_A and phi over independent random starts."""

    results: list[OptResult]
    max_r_A: float
    median_r_A: float
    min_r_A: float
    max_phi: float
    median_phi: float
    min_phi: float

    @classmethod
    def from_results(cls, results: list[OptResult]) -> "MultistartStats":
        r_a = np.array([r.r_A for r in results], dtype=float)
        phi = np.array([r.phi for r in results], dtype=float)
        return cls(
            results=results,
            max_r_A=float(r_a.max()),
            median_r_A=float(np.median(r_a)),
            min_r_A=float(r_a.min()),
            max_phi=float(phi.max()),
            median_phi=float(np.median(phi)),
            min_phi=float(phi.min()),
        )

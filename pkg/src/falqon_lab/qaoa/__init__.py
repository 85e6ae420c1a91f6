"""QAOA baselines: circuit evaluation, adjoint gradients and BFGS."""

from .bfgs import bfgs_minimize
from .circuit import qaoa_energy, qaoa_energy_and_gradient, qaoa_evolve
from .models import (
    BfgsOptions,
    FalqonPlusResult,
    IterationRecord,
    MultistartStats,
    OptResult,
    QaoaParams,
)
from .strategies import falqon_plus, falqon_seed, multistart_qaoa, random_initial_angles

__all__ = [
    "BfgsOptions",
    "FalqonPlusResult",
    "IterationRecord",
    "MultistartStats",
    "OptResult",
    "QaoaParams",
    "bfgs_minimize",
    "falqon_plus",
    "falqon_seed",
    "multistart_qaoa",
    "qaoa_energy",
    "qaoa_energy_and_gradient",
    "qaoa_evolve",
    "random_initial_angles",
]

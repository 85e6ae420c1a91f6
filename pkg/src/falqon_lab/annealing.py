"""
Digitized linear annealing baseline and the FALQON-vs-annealing comparison.

A run of K steps tiles [0, T] with blocks of length 2 dt (one H_p and one H_d
application of dt each, like a FALQON layer); the schedule u(t) = 1 - t/T is
sampled at the block midpoints.
"""

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from falqon_lab.exceptions import ParameterError
from falqon_lab.falqon.trace import FalqonTrace, TerminationReason
from falqon_lab.graphs import Graph, MaxCutSolution, brute_force_maxcut, graph_hash
from falqon_lab.hamiltonian import (
    DriverSpec,
    build_commutator_observable,
    build_problem_diagonal,
)
from falqon_lab.metrics import approximation_ratio, success_probability
from falqon_lab.simulator import (
    apply_driver,
    apply_problem_phase,
    expectation_diagonal,
    expectation_pauli_sum,
    init_state,
)

logger = logging.getLogger(__name__)


class AnnealConfig(BaseModel):
    """Total time T and nominal Trotter step dt of a linear anneal."""

    T: float = Field(gt=0)
    dt: float = Field(gt=0)
    schedule: Literal["linear"] = "linear"

    @model_validator(mode="after")
    def _step_fits(self) -> "AnnealConfig":
        if self.dt > self.T:
            raise ValueError("dt must not exceed T")
        return self

    @property
    def steps(self) -> int:
        return max(1, round(self.T / (2 * self.dt)))

    @property
    def effective_dt(self) -> float:
        """Step length that makes K blocks of 2 dt cover [0, T] exactly."""
        return self.T / (2 * self.steps)


def linear_schedule(t: float | np.ndarray, T: float) -> float | np.ndarray:
    """u(t) = 1 - t / T."""
    if T <= 0:
        raise ParameterError("annealing time must be positive", {"T": T})
    return 1.0 - t / T


def anneal_schedule(config: AnnealConfig) -> np.ndarray:
    """Midpoint values u_k = 1 - (2k + 1) dt / T for k = 0..K-1."""
    dt = config.effective_dt
    midpoints = (2 * np.arange(config.steps) + 1) * dt
    return np.asarray(linear_schedule(midpoints, config.T), dtype=float)


def run_linear_anneal(
    graph: Graph, config: AnnealConfig, solution: MaxCutSolution | None = None
) -> FalqonTrace:
    """
    Per step: e^(-i (1 - u) H_p dt) then e^(-i u H_d dt), starting in the
    ground state of H_d. The ``beta`` column carries u at the block midpoint.
    """
    diag = build_problem_diagonal(graph)
    driver = DriverSpec.sum_x(graph.n)
    observable = build_commutator_observable(graph, driver)
    solution = solution or brute_force_maxcut(graph)
    state = init_state(graph.n)
    dt = config.effective_dt
    schedule = anneal_schedule(config)

    logger.info(
        f"Starting linear anneal: n={graph.n}, T={config.T}, steps={config.steps}",
        extra={"graph_hash": graph_hash(graph), "mode": "anneal"},
    )

    initial_A = expectation_pauli_sum(state, observable)
    initial_E_p = expectation_diagonal(state, diag)
    a_values, energies, r_a, phi = [], [], [], []
    for u in schedule:
        state = apply_problem_phase(state, diag, (1.0 - u) * dt)
        state = apply_driver(state, driver, u * dt)
        energy = expectation_diagonal(state, diag)
        a_values.append(expectation_pauli_sum(state, observable))
        energies.append(energy)
        r_a.append(approximation_ratio(energy, solution.min_energy))
        phi.append(success_probability(state, solution))

    steps = config.steps
    trace = FalqonTrace(
        layers=np.arange(1, steps + 1),
        beta=schedule,
        A=np.array(a_values),
        E_p=np.array(energies),
        r_A=np.array(r_a),
        phi=np.array(phi),
        dt_bound=np.full(steps, np.nan),
        terminated_at=steps,
        termination_reason=TerminationReason.MAX_LAYERS,
        min_energy=solution.min_energy,
        initial_A=initial_A,
        initial_E_p=initial_E_p,
        next_beta=0.0,
        final_state=state,
        metadata={
            "mode": "anneal",
            "schedule": config.schedule,
            "beta_column": "u(t) at block midpoints",
            "T": config.T,
            "dt": dt,
            "steps": steps,
        },
    )
    logger.info(f"Anneal finished: r_A={trace.final_r_A:.6f} phi={trace.final_phi:.6f}")
    return trace


# ——— Comparison ———


class Threshold(BaseModel):
    """Criterion r_A >= value or phi >= value."""

    metric: Literal["r_A", "phi"]
    value: float

    @classmethod
    def parse(cls, text: str) -> "Threshold":
        """Accept ``rA=0.932``, ``r_A=0.932`` or ``phi=0.5``."""
        name, sep, raw = text.partition("=")
        metric = {"rA": "r_A", "r_A": "r_A", "phi": "phi"}.get(name.strip())
        try:
            value = float(raw)
        except ValueError:
            value, metric = float("nan"), None
        if not sep or metric is None:
            raise ParameterError("threshold must look like rA=0.932 or phi=0.5", {"text": text})
        return cls(metric=metric, value=value)

    def met(self, trace: FalqonTrace) -> np.ndarray:
        values = trace.r_A if self.metric == "r_A" else trace.phi
        return values >= self.value


def time_to_threshold(
    trace: FalqonTrace, threshold: Threshold, dt: float | None = None
) -> float | None:
    """Digitized time 2 k dt of the k-th executed layer first meeting the criterion."""
    dt = dt if dt is not None else trace.metadata.get("dt")
    if dt is None:
        raise ParameterError("time step unknown; pass dt explicitly")
    hits = np.flatnonzero(threshold.met(trace))
    if hits.size == 0:
        return None
    return 2.0 * (int(hits[0]) + 1) * dt


class ComparisonRow(BaseModel):
    """One instance of the FALQON-vs-annealing comparison at equal digitized time."""

    graph_hash: str
    T: float | None
    falqon_r_A: float | None = None
    falqon_phi: float | None = None
    anneal_r_A: float | None = None
    anneal_phi: float | None = None


def compare_with_falqon(
    graph: Graph,
    falqon_trace: FalqonTrace,
    threshold: Threshold,
    dt: float | None = None,
) -> tuple[ComparisonRow, FalqonTrace | None]:
    """
    Fix T from the FALQON crossing time and anneal for that T with the same
    step; returns the row and the annealing trace (None if never crossed).
    """
    dt = dt if dt is not None else falqon_trace.metadata.get("dt")
    if dt is None:
        raise ParameterError("time step unknown; pass dt explicitly")
    T = time_to_threshold(falqon_trace, threshold, dt)
    key = graph_hash(graph)
    if T is None:
        logger.warning(f"FALQON never met {threshold.metric} >= {threshold.value} on {key[:12]}")
        return ComparisonRow(graph_hash=key, T=None), None

    k = round(T / (2 * dt)) - 1
    anneal = run_linear_anneal(graph, AnnealConfig(T=T, dt=dt))
    row = ComparisonRow(
        graph_hash=key,
        T=T,
        falqon_r_A=float(falqon_trace.r_A[k]),
        falqon_phi=float(falqon_trace.phi[k]),
        anneal_r_A=anneal.final_r_A,
        anneal_phi=anneal.final_phi,
    )
    return row, anneal

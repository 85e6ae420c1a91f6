"""Figures of merit, the QLC convergence-criteria report and ensemble summaries."""

import logging
from collections.abc import Sequence
from typing import Protocol

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import eigh

from falqon_lab.config import get_settings
from falqon_lab.exceptions import DegenerateInstanceError, ParameterError, require_capacity
from falqon_lab.graphs import Graph, MaxCutSolution, bitstring_to_index
from falqon_lab.hamiltonian import DriverSpec, IsingDiagonal, build_problem_diagonal
from falqon_lab.models import SummaryRow
from falqon_lab.simulator import StateVector, expectation_diagonal, init_state

logger = logging.getLogger(__name__)

INSTANTANEOUS_TOLERANCE = 0.01
EIGENVALUE_TOLERANCE = 1e-9
COUPLING_TOLERANCE = 1e-12
_MAX_REPORTED_PAIRS = 100


# ——— Figures of merit ———


def approximation_ratio(energy: float, min_energy: float) -> float:
    """r_A = E / E_min; both are negative for MaxCut, so r_A lies in [0, 1]."""
    if min_energy == 0:
        raise DegenerateInstanceError(
            "approximation ratio undefined for a zero ground energy (edgeless graph)"
        )
    if min_energy > 0:
        raise ParameterError("MaxCut ground energy must be negative", {"E_min": min_energy})
    return energy / min_energy


def success_probability(state: StateVector, solution: MaxCutSolution) -> float:
    """phi: total population on the optimal bitstrings."""
    indices = solution.optimal_indices or tuple(
        bitstring_to_index(z) for z in solution.optimal_bitstrings
    )
    if indices and max(indices) >= state.amplitudes.size:
        raise ParameterError("solution does not match the state dimension")
    return float(state.probabilities()[list(indices)].sum())


def instantaneous_overlap(
    state: StateVector,
    graph: Graph,
    beta: float,
    tol: float = INSTANTANEOUS_TOLERANCE,
    driver: DriverSpec | None = None,
    diag: IsingDiagonal | None = None,
) -> float:
    """
    phi_inst: population on eigenvectors of H_p + beta H_d whose eigenvalue is
    within ``tol`` of the lowest one.
    """
    require_capacity(state.n, get_settings().max_overlap_qubits, "instantaneous_overlap")
    diag = diag or build_problem_diagonal(graph)
    driver = driver or DriverSpec.sum_x(state.n)
    if state.n != diag.n:
        raise ParameterError("dimension mismatch", {"state_n": state.n, "graph_n": diag.n})

    hamiltonian = diag.to_dense() + beta * driver.to_dense()
    eigenvalues, eigenvectors = eigh(hamiltonian)
    ground = eigenvectors[:, eigenvalues <= eigenvalues[0] + tol]
    return float(np.sum(np.abs(ground.conj().T @ state.amplitudes) ** 2))


# ——— Convergence criteria ———


class ViolatingPair(BaseModel):
    """Eigen-index pair (in ascending-eigenvalue order) violating a criterion."""

    criterion: int
    i: int
    j: int


class CriteriaReport(BaseModel):
    """Sufficient conditions for asymptotic convergence of Lyapunov control."""

    degenerate_eigenvalues: bool = Field(description="Criterion 1 fails")
    degenerate_gaps: bool = Field(description="Criterion 2 fails")
    driver_connects_all_pairs: bool = Field(description="Criterion 3 holds")
    initial_energy_below_first_excited: bool = Field(description="Criterion 4 holds")
    details: list[ViolatingPair] = Field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return (
            not self.degenerate_eigenvalues
            and not self.degenerate_gaps
            and self.driver_connects_all_pairs
            and self.initial_energy_below_first_excited
        )


def convergence_criteria_report(
    diag: IsingDiagonal, driver: DriverSpec, psi0: StateVector
) -> CriteriaReport:
    """Evaluate the four criteria for a diagonal H_p (eigenvectors = basis states)."""
    require_capacity(diag.n, get_settings().max_criteria_qubits, "convergence criteria")
    if driver.n != diag.n or psi0.n != diag.n:
        raise ParameterError("driver, state and H_p must act on the same qubits")

    order = np.argsort(diag.values, kind="stable")
    q = diag.values[order]
    dim = q.size
    details: list[ViolatingPair] = []

    def note(criterion: int, i: int, j: int) -> None:
        if len(details) < _MAX_REPORTED_PAIRS:
            details.append(ViolatingPair(criterion=criterion, i=i, j=j))

    # (1) repeated eigenvalues
    repeated = np.flatnonzero(np.diff(q) < EIGENVALUE_TOLERANCE)
    for i in repeated:
        note(1, int(i), int(i) + 1)

    # (2) repeated gaps over distinct pairs i < j
    i_idx, j_idx = np.triu_indices(dim, k=1)
    gaps = q[j_idx] - q[i_idx]
    gap_order = np.argsort(gaps, kind="stable")
    collisions = np.flatnonzero(np.diff(gaps[gap_order]) < EIGENVALUE_TOLERANCE)
    for c in collisions[:_MAX_REPORTED_PAIRS]:
        first = gap_order[c]
        note(2, int(i_idx[first]), int(j_idx[first]))

    # (3) driver couples every pair of eigenstates
    coupling = np.abs(driver.to_dense()[np.ix_(order, order)])
    np.fill_diagonal(coupling, np.inf)
    weak = np.argwhere(coupling < COUPLING_TOLERANCE)
    for i, j in weak:
        if i < j:
            note(3, int(i), int(j))

    # (4) initial energy below the first excited eigenvalue
    energy = expectation_diagonal(psi0, diag)
    below = bool(dim > 1 and energy < q[1])

    report = CriteriaReport(
        degenerate_eigenvalues=bool(repeated.size),
        degenerate_gaps=bool(collisions.size),
        driver_connects_all_pairs=not bool(weak.size),
        initial_energy_below_first_excited=below,
        details=details,
    )
    logger.debug(f"Criteria report: all_satisfied={report.all_satisfied}")
    return report


def check_qlc_convergence_criteria(
    graph: Graph, driver: DriverSpec | None = None, psi0: StateVector | None = None
) -> CriteriaReport:
    """Criteria report for the MaxCut H_p of ``graph``."""
    require_capacity(graph.n, get_settings().max_criteria_qubits, "convergence criteria")
    driver = driver or DriverSpec.sum_x(graph.n)
    psi0 = psi0 or init_state(graph.n)
    return convergence_criteria_report(build_problem_diagonal(graph), driver, psi0)


# ——— Ensemble aggregation ———


class CurveTrace(Protocol):
    layers: np.ndarray
    r_A: np.ndarray
    phi: np.ndarray


def ensemble_summary(traces: Sequence[CurveTrace]) -> list[SummaryRow]:
    """Per-layer mean and population std of r_A and phi over the traces present."""
    if not traces:
        return []
    longest = max(traces, key=lambda t: len(t.layers))
    rows: list[SummaryRow] = []
    for position, layer in enumerate(longest.layers):
        present = [t for t in traces if len(t.layers) > position]
        r_a = np.array([t.r_A[position] for t in present], dtype=float)
        phi = np.array([t.phi[position] for t in present], dtype=float)
        rows.append(
            SummaryRow(
                layer=int(layer),
                count=len(present),
                r_A_mean=float(r_a.mean()),
                r_A_std=float(r_a.std()),
                phi_mean=float(phi.mean()),
                phi_std=float(phi.std()),
            )
        )
    return rows

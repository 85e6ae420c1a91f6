"""
QAOA circuit evaluation and its adjoint-method gradient.

Angles are full rotation angles: layer k applies e^(-i gamma_k H_p) and then
e^(-i beta_k H_d) with the sum-of-X driver.
"""

import numpy as np

from falqon_lab.exceptions import ParameterError
from falqon_lab.graphs import Graph
from falqon_lab.hamiltonian import DriverSpec, IsingDiagonal, build_problem_diagonal
from falqon_lab.qaoa.models import QaoaParams
from falqon_lab.simulator import (
    StateVector,
    apply_driver,
    apply_driver_hamiltonian,
    apply_problem_phase,
    expectation_diagonal,
    init_state,
)


def _evolve(diag: IsingDiagonal, driver: DriverSpec, params: QaoaParams) -> StateVector:
    state = init_state(diag.n)
    for gamma, beta in zip(params.gammas, params.betas):
        state = apply_problem_phase(state, diag, gamma)
        state = apply_driver(state, driver, beta)
    return state


def _check(graph: Graph, diag: IsingDiagonal | None) -> IsingDiagonal:
    diag = diag or build_problem_diagonal(graph)
    if diag.n != graph.n:
        raise ParameterError("diagonal does not match the graph", {"n": graph.n})
    return diag


def qaoa_evolve(
    graph: Graph, params: QaoaParams, diag: IsingDiagonal | None = None
) -> StateVector:
    """Apply the l-layer circuit to the driver ground state."""
    diag = _check(graph, diag)
    return _evolve(diag, DriverSpec.sum_x(graph.n), params)


def qaoa_energy(graph: Graph, params: QaoaParams, diag: IsingDiagonal | None = None) -> float:
    diag = _check(graph, diag)
    return expectation_diagonal(_evolve(diag, DriverSpec.sum_x(graph.n), params), diag)


def qaoa_energy_and_gradient(
    graph: Graph, params: QaoaParams, diag: IsingDiagonal | None = None
) -> tuple[float, np.ndarray]:
    """
    Energy and gradient [dE/dgamma..., dE/dbeta...] by a reverse sweep.

    With |lambda> = H_p|psi> carried backwards alongside |psi>, each
    derivative is 2 Im <lambda|G|psi> for the generator G of that gate.
    """
    diag = _check(graph, diag)
    driver = DriverSpec.sum_x(graph.n)
    psi = _evolve(diag, driver, params)
    energy = expectation_diagonal(psi, diag)

    lam = StateVector(psi.n, diag.apply(psi.amplitudes))
    layers = params.layers
    grad = np.zeros(2 * layers)
    for k in reversed(range(layers)):
        grad[layers + k] = 2.0 * np.vdot(
            lam.amplitudes, apply_driver_hamiltonian(psi, driver)
        ).imag
        psi = apply_driver(psi, driver, -params.betas[k])
        lam = apply_driver(lam, driver, -params.betas[k])

        grad[k] = 2.0 * np.vdot(lam.amplitudes, diag.apply(psi.amplitudes)).imag
        psi = apply_problem_phase(psi, diag, -params.gammas[k])
        lam = apply_problem_phase(lam, diag, -params.gammas[k])

    return energy, grad

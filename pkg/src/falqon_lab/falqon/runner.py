"""
Feedback loops: the base algorithm, reference perturbation, iterative
refinement and multiple drivers.

The state is carried forward layer by layer rather than re-prepared; in exact
mode this is identical to re-running the stored schedule, and sampling noise
only enters through the A estimates.
"""

import logging
from collections.abc import Sequence

import numpy as np

from falqon_lab.exceptions import NumericalError, ParameterError
from falqon_lab.falqon.bounds import delta_t_bound
from falqon_lab.falqon.config import FalqonConfig
from falqon_lab.falqon.trace import FalqonTrace, TerminationReason
from falqon_lab.graphs import Graph, MaxCutSolution, brute_force_maxcut, graph_hash
from falqon_lab.hamiltonian import (
    DriverSpec,
    build_commutator_observable,
    build_problem_diagonal,
)
from falqon_lab.measurement import ObservableEstimator
from falqon_lab.metrics import approximation_ratio, instantaneous_overlap, success_probability
from falqon_lab.simulator import (
    StateVector,
    apply_driver,
    apply_problem_phase,
    driver_expectation,
    expectation_diagonal,
    init_state,
)

logger = logging.getLogger(__name__)

# |beta_l| above this share of max|beta| voids the iterative improvement guarantee
ITERATIVE_TAIL_TOLERANCE = 0.01
MONOTONICITY_TOLERANCE = 1e-12


def _feedback_loop(
    graph: Graph,
    config: FalqonConfig,
    drivers: Sequence[DriverSpec],
    weights: Sequence[float],
    reference: np.ndarray | None,
    initial_state: StateVector | None,
    solution: MaxCutSolution | None,
    mode: str,
) -> FalqonTrace:
    """Shared engine; drivers[0] carries the reference offset and the bound."""
    diag = build_problem_diagonal(graph)
    solution = solution or brute_force_maxcut(graph)
    state = initial_state or init_state(graph.n, config.initial_state)
    if state.n != graph.n:
        raise ParameterError("initial state does not match the graph", {"n": graph.n})

    n_p = diag.norm
    n_d = sum(d.norm() for d in drivers)
    estimators = [
        ObservableEstimator(build_commutator_observable(graph, d), config.estimator)
        for d in drivers
    ]
    n_drivers = len(drivers)
    offset = 0 if reference is not None else 1
    total = config.layer_count
    tolerance = config.stop.tolerance(n_p)

    logger.info(
        f"Starting {mode} run: n={graph.n}, layers={total}, dt={config.dt}",
        extra={"graph_hash": graph_hash(graph), "mode": mode, "drivers": n_drivers},
    )

    betas = np.full(n_drivers, config.beta_init, dtype=float)
    initial_A = np.array([est.estimate(state, j) for j, est in enumerate(estimators)])
    initial_E_p = expectation_diagonal(state, diag)

    records: dict[str, list[float]] = {
        key: [] for key in ("beta", "A", "E_p", "r_A", "phi", "dt_bound", "nu", "E_ref")
    }
    phi_inst: list[float] = []
    driver_beta: list[np.ndarray] = []
    driver_A: list[np.ndarray] = []
    reason = TerminationReason.MAX_LAYERS

    for position in range(total):
        lam = float(reference[position]) if reference is not None else 0.0
        angles = betas.copy()
        angles[0] += lam

        state = apply_problem_phase(state, diag, config.dt)
        for j in reversed(range(n_drivers)):
            state = apply_driver(state, drivers[j], angles[j] * config.dt)

        a_values = np.array(
            [
                est.estimate(state, (position + 1) * n_drivers + j)
                for j, est in enumerate(estimators)
            ]
        )
        energy = expectation_diagonal(state, diag)
        if not (np.all(np.isfinite(a_values)) and np.isfinite(energy)):
            raise NumericalError(
                "non-finite value during feedback loop", {"layer": position + offset}
            )

        records["beta"].append(float(betas[0]))
        records["A"].append(float(a_values[0]))
        records["E_p"].append(energy)
        records["r_A"].append(approximation_ratio(energy, solution.min_energy))
        records["phi"].append(success_probability(state, solution))
        records["dt_bound"].append(delta_t_bound(a_values[0], angles[0], n_p, n_d))
        records["nu"].append(float(angles[0]))
        records["E_ref"].append(energy + lam * driver_expectation(state, drivers[0]))
        if config.record_phi_inst:
            phi_inst.append(
                instantaneous_overlap(state, graph, float(angles[0]), driver=drivers[0], diag=diag)
            )
        driver_beta.append(betas.copy())
        driver_A.append(a_values)

        logger.debug(
            f"Layer {position + offset}: beta={betas[0]:.6g} A={a_values[0]:.6g} E_p={energy:.10g}"
        )

        betas = np.array(
            [config.law.beta(a, w) for a, w in zip(a_values, weights)], dtype=float
        )

        window = config.stop.window
        if (
            config.stop.enabled
            and position >= window
            and abs(energy - records["E_p"][position - window]) < tolerance
        ):
            reason = TerminationReason.CONVERGED
            break

    executed = len(records["E_p"])
    trace = FalqonTrace(
        layers=np.arange(offset, offset + executed),
        beta=np.array(records["beta"]),
        A=np.array(records["A"]),
        E_p=np.array(records["E_p"]),
        r_A=np.array(records["r_A"]),
        phi=np.array(records["phi"]),
        dt_bound=np.array(records["dt_bound"]),
        terminated_at=executed,
        termination_reason=reason,
        min_energy=solution.min_energy,
        initial_A=float(initial_A[0]),
        initial_E_p=initial_E_p,
        next_beta=float(betas[0]),
        final_state=state,
        phi_inst=np.array(phi_inst) if config.record_phi_inst else None,
        nu=np.array(records["nu"]) if reference is not None else None,
        E_ref=np.array(records["E_ref"]) if reference is not None else None,
        driver_beta=np.array(driver_beta) if n_drivers > 1 else None,
        driver_A=np.array(driver_A) if n_drivers > 1 else None,
        metadata={
            "mode": mode,
            "dt": config.dt,
            "n_p": n_p,
            "n_d": n_d,
            "drivers": [d.label for d in drivers],
        },
    )

    logger.info(
        f"Finished {mode} run after {executed} layers ({reason.value}): "
        f"r_A={trace.final_r_A:.6f} phi={trace.final_phi:.6f}",
        extra={"terminated_at": executed, "termination_reason": reason.value},
    )
    return trace


# ——— Public entry points ———


def run_falqon(
    graph: Graph,
    config: FalqonConfig,
    initial_state: StateVector | None = None,
    solution: MaxCutSolution | None = None,
    driver: DriverSpec | None = None,
) -> FalqonTrace:
    """
    Base feedback loop over layers 1..l.

    beta_1 = beta_init; after layer k the commutator expectation A_k is
    estimated and beta_(k+1) = -w A_k. When ``config.reference`` is set the
    run is delegated to ``run_falqon_reference``.
    """
    if config.reference is not None:
        return run_falqon_reference(graph, config, initial_state, solution, driver)
    driver = driver or DriverSpec.sum_x(graph.n)
    return _feedback_loop(
        graph, config, [driver], [config.law.w], None, initial_state, solution, "base"
    )


def run_falqon_reference(
    graph: Graph,
    config: FalqonConfig,
    initial_state: StateVector | None = None,
    solution: MaxCutSolution | None = None,
    driver: DriverSpec | None = None,
) -> FalqonTrace:
    """
    Layers 0..l with driver coefficient nu_k = lambda_k + beta_k; the
    feedback law still sets beta_(k+1) = -w A_k.
    """
    if config.reference is None:
        raise ParameterError("reference run needs a reference schedule")
    reference = np.asarray(config.reference, dtype=float)
    if reference.size != config.max_layers + 1:
        raise ParameterError(
            "reference schedule must have max_layers + 1 entries",
            {"length": int(reference.size), "expected": config.max_layers + 1},
        )
    driver = driver or DriverSpec.sum_x(graph.n)
    return _feedback_loop(
        graph, config, [driver], [config.law.w], reference, initial_state, solution, "reference"
    )


def run_falqon_multidriver(
    graph: Graph,
    drivers: Sequence[DriverSpec],
    config: FalqonConfig,
    weights: Sequence[float] | None = None,
    initial_state: StateVector | None = None,
    solution: MaxCutSolution | None = None,
) -> FalqonTrace:
    """
    One feedback coefficient per driver: beta(j, k+1) = -w_j A(j, k).

    Each layer applies U_p and then the drivers with the last one first, i.e.
    U_(d,1) ... U_(d,J) U_p. ``beta``/``A`` columns of the trace follow
    drivers[0]; ``driver_beta``/``driver_A`` hold all of them when J > 1.
    """
    if not drivers:
        raise ParameterError("at least one driver is required")
    if config.reference is not None:
        raise ParameterError("reference schedules are not supported with multiple drivers")
    for d in drivers:
        if d.n != graph.n:
            raise ParameterError("driver qubit count mismatch", {"driver": d.n, "graph": graph.n})
    weights = list(weights) if weights is not None else [config.law.w] * len(drivers)
    if len(weights) != len(drivers) or any(w <= 0 for w in weights):
        raise ParameterError("need one positive gain per driver", {"weights": weights})
    return _feedback_loop(
        graph, config, list(drivers), weights, None, initial_state, solution, "multidriver"
    )


def run_falqon_iterative(
    graph: Graph,
    config: FalqonConfig,
    iterations: int,
    initial_state: StateVector | None = None,
    solution: MaxCutSolution | None = None,
) -> list[FalqonTrace]:
    """
    Every iteration runs layers 0..l. Iteration 0 is the base loop under a zero
    reference; iteration j >= 1 uses the previous schedule as reference and adds
    the fresh corrections to it: beta^(j) = beta^(j-1) + beta~^(j), which is the
    applied ``nu`` of run j.
    """
    if iterations < 1:
        raise ParameterError("iterations must be >= 1", {"iterations": iterations})
    fixed = config.model_copy(
        update={"reference": None, "stop": config.stop.model_copy(update={"enabled": False})}
    )
    solution = solution or brute_force_maxcut(graph)

    run_config = fixed.model_copy(update={"reference": [0.0] * (config.max_layers + 1)})
    traces: list[FalqonTrace] = []
    for j in range(iterations):
        trace = run_falqon_reference(graph, run_config, initial_state, solution)
        trace.metadata["iteration"] = j
        traces.append(trace)
        schedule = trace.applied_beta.copy()
        run_config = fixed.model_copy(update={"reference": schedule.tolist(), "beta_init": 0.0})

        peak = float(np.max(np.abs(schedule))) if schedule.size else 0.0
        if peak > 0 and abs(schedule[-1]) > ITERATIVE_TAIL_TOLERANCE * peak:
            logger.warning(
                f"Iteration {j}: |beta_l| = {abs(schedule[-1]):.3g} exceeds "
                f"{ITERATIVE_TAIL_TOLERANCE:g} * max|beta|; improvement is not guaranteed",
                extra={"iteration": j},
            )

    return traces


# ——— Schedules and diagnostics ———


def linear_reference_schedule(lambda_0: float, layers: int) -> list[float]:
    """lambda_k = lambda_0 (1 - k / l) for k = 0..l, ending at exactly zero."""
    if layers < 1:
        raise ParameterError("layers must be >= 1", {"layers": layers})
    return [lambda_0 * (1.0 - k / layers) for k in range(layers + 1)]


def monotonicity_violations(
    trace: FalqonTrace, tol: float = MONOTONICITY_TOLERANCE
) -> list[int]:
    """Layer labels at which E_p rose by more than ``tol`` over the previous layer."""
    energies = np.concatenate([[trace.initial_E_p], trace.E_p])
    rises = np.flatnonzero(np.diff(energies) > tol)
    return [int(trace.layers[i]) for i in rises]


def beta_sign_alternation(trace: FalqonTrace) -> int:
    """Longest run of consecutive sign flips in beta."""
    signs = np.sign(trace.beta)
    longest = current = 0
    for a, b in zip(signs[:-1], signs[1:]):
        if a * b < 0:
            current += 1
            longest = max(longest, current)
        else:
            current = 0
    return longest

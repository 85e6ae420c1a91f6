"""
Initialization strategies for QAOA: FALQON seeding and random multistart.
"""

import logging
from functools import partial

import numpy as np

from falqon_lab.ensemble import run_ensemble
from falqon_lab.exceptions import ParameterError
from falqon_lab.falqon.config import FalqonConfig, StopRule
from falqon_lab.falqon.runner import run_falqon
from falqon_lab.falqon.trace import FalqonTrace
from falqon_lab.graphs import Graph, MaxCutSolution, brute_force_maxcut
from falqon_lab.hamiltonian import IsingDiagonal, build_problem_diagonal
from falqon_lab.metrics import approximation_ratio, success_probability
from falqon_lab.qaoa.bfgs import bfgs_minimize
from falqon_lab.qaoa.circuit import qaoa_energy_and_gradient, qaoa_evolve
from falqon_lab.qaoa.models import (
    BfgsOptions,
    FalqonPlusResult,
    MultistartStats,
    OptResult,
    QaoaParams,
)
from falqon_lab.simulator import fidelity

logger = logging.getLogger(__name__)

SEED_FIDELITY_TOLERANCE = 1e-9


def _optimize(
    graph: Graph,
    diag: IsingDiagonal,
    solution: MaxCutSolution,
    x0: np.ndarray,
    options: BfgsOptions | None,
) -> OptResult:
    def objective(x: np.ndarray) -> tuple[float, np.ndarray]:
        return qaoa_energy_and_gradient(graph, QaoaParams.from_vector(x), diag)

    result = bfgs_minimize(objective, x0, options)
    state = qaoa_evolve(graph, result.params, diag)
    return result.model_copy(
        update={
            "r_A": approximation_ratio(result.energy, solution.min_energy),
            "phi": success_probability(state, solution),
        }
    )


def falqon_seed(trace: FalqonTrace, dt: float) -> QaoaParams:
    """gamma_k = dt and beta_k = (FALQON beta_k) dt reproduce the FALQON state."""
    return QaoaParams(gammas=[dt] * trace.terminated_at, betas=(trace.beta * dt).tolist())


def falqon_plus(
    graph: Graph,
    layers: int,
    dt: float,
    options: BfgsOptions | None = None,
    trace: FalqonTrace | None = None,
) -> FalqonPlusResult:
    """Run l exact FALQON layers, then optimize the QAOA angles from that seed."""
    if layers < 1:
        raise ParameterError("layers must be >= 1", {"layers": layers})
    solution = brute_force_maxcut(graph)
    diag = build_problem_diagonal(graph)
    if trace is None:
        config = FalqonConfig(dt=dt, max_layers=layers, stop=StopRule(enabled=False))
        trace = run_falqon(graph, config, solution=solution)
    elif trace.terminated_at != layers:
        raise ParameterError(
            "seed trace length differs from the requested layers",
            {"layers": layers, "trace_layers": trace.terminated_at},
        )

    seed = falqon_seed(trace, dt)
    if trace.final_state is not None:
        replay = fidelity(qaoa_evolve(graph, seed, diag), trace.final_state)
        if replay < 1.0 - SEED_FIDELITY_TOLERANCE:
            logger.warning(
                f"FALQON seed reproduces the seed trace state only to fidelity {replay:.6f}",
                extra={"fidelity": replay},
            )
    result = _optimize(graph, diag, solution, seed.to_vector(), options)
    logger.info(
        f"FALQON+ on {layers} layers: r_A {trace.final_r_A:.6f} -> {result.r_A:.6f}, "
        f"phi {trace.final_phi:.6f} -> {result.phi:.6f}",
        extra={"iterations": result.iterations, "converged": result.converged},
    )
    return FalqonPlusResult(
        **result.model_dump(),
        seed_params=seed,
        falqon_r_A=trace.final_r_A,
        falqon_phi=trace.final_phi,
    )


def random_initial_angles(layers: int, seed: int, start: int) -> np.ndarray:
    """2l angles uniform on (0, pi) from the (seed, start) stream."""
    rng = np.random.default_rng([seed, start])
    return rng.uniform(0.0, np.pi, size=2 * layers)


def _run_start(
    start: int, graph: Graph, layers: int, seed: int, options: BfgsOptions | None
) -> OptResult:
    solution = brute_force_maxcut(graph)
    diag = build_problem_diagonal(graph)
    x0 = random_initial_angles(layers, seed, start)
    return _optimize(graph, diag, solution, x0, options)


def multistart_qaoa(
    graph: Graph,
    layers: int,
    starts: int,
    seed: int = 0,
    options: BfgsOptions | None = None,
    workers: int | None = 1,
) -> MultistartStats:
    """Optimize from ``starts`` independent random points and aggregate r_A and phi."""
    if starts < 1:
        raise ParameterError("starts must be >= 1", {"starts": starts})
    if layers < 1:
        raise ParameterError("layers must be >= 1", {"layers": layers})
    task = partial(_run_start, graph=graph, layers=layers, seed=seed, options=options)
    results = run_ensemble(task, list(range(starts)), workers)
    stats = MultistartStats.from_results(results)
    logger.info(
        f"Multistart over {starts} starts: r_A max={stats.max_r_A:.6f} "
        f"median={stats.median_r_A:.6f} min={stats.min_r_A:.6f}"
    )
    return stats

"""BFGS with an inverse-Hessian update and Armijo backtracking."""

import logging
from collections.abc import Callable

import numpy as np

from falqon_lab.exceptions import NumericalError
from falqon_lab.qaoa.models import BfgsOptions, IterationRecord, OptResult

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

CURVATURE_FLOOR = 1e-12


def _evaluate(objective: Objective, x: np.ndarray) -> tuple[float, np.ndarray]:
    value, grad = objective(x)
    grad = np.asarray(grad, dtype=float)
    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        raise NumericalError(
            "objective or gradient is not finite",
            {"x": x.tolist(), "value": float(value)},
        )
    return float(value), grad


def bfgs_minimize(
    objective: Objective, x0: np.ndarray, options: BfgsOptions | None = None
) -> OptResult:
    """
    Minimize a smooth objective returning (value, gradient).

    Accepted steps satisfy the Armijo condition, so recorded objective values
    never increase. The curvature update is skipped when y^T s is not
    positive, and a non-descent direction resets the inverse Hessian.
    """
    options = options or BfgsOptions()
    x = np.array(x0, dtype=float)
    dim = x.size
    value, grad = _evaluate(objective, x)
    initial_value = value
    inverse_hessian = np.eye(dim)
    history = [
        IterationRecord(iter=0, energy=value, grad_norm=float(np.linalg.norm(grad)), step=0.0)
    ]
    iterations = 0
    first_update = True

    while iterations < options.max_iters and np.linalg.norm(grad) >= options.grad_tol:
        direction = -inverse_hessian @ grad
        slope = float(grad @ direction)
        if slope >= 0:
            inverse_hessian = np.eye(dim)
            direction = -grad
            slope = float(grad @ direction)

        step = 1.0
        for _ in range(options.max_backtracks):
            candidate = x + step * direction
            new_value, new_grad = _evaluate(objective, candidate)
            if new_value <= value + options.armijo_c * step * slope:
                break
            step *= options.shrink
        else:
            logger.debug(f"Line search stalled at iteration {iterations + 1}")
            break

        s = candidate - x
        y = new_grad - grad
        sy = float(s @ y)
        if sy > CURVATURE_FLOOR:
            if first_update:
                inverse_hessian = (sy / float(y @ y)) * np.eye(dim)
                first_update = False
            rho = 1.0 / sy
            left = np.eye(dim) - rho * np.outer(s, y)
            inverse_hessian = left @ inverse_hessian @ left.T + rho * np.outer(s, s)

        x, value, grad = candidate, new_value, new_grad
        iterations += 1
        history.append(
            IterationRecord(
                iter=iterations,
                energy=value,
                grad_norm=float(np.linalg.norm(grad)),
                step=float(np.linalg.norm(s)),
            )
        )

    gradient_norm = float(np.linalg.norm(grad))
    converged = gradient_norm < options.grad_tol
    logger.debug(
        f"BFGS finished: iterations={iterations} value={value:.10g} "
        f"grad_norm={gradient_norm:.3g} converged={converged}"
    )
    return OptResult(
        x=x.tolist(),
        energy=value,
        initial_energy=initial_value,
        iterations=iterations,
        gradient_norm=gradient_norm,
        converged=converged,
        history=history,
    )

"""
Ensemble execution: independent runs mapped over a bounded process pool.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

import numpy as np

from falqon_lab.config import get_settings
from falqon_lab.exceptions import ParameterError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(master_seed: int, instance_id: int) -> int:
    """Per-run seed from (master seed, instance id), independent of scheduling."""
    if master_seed < 0 or instance_id < 0:
        raise ParameterError(
            "seeds must be non-negative", {"master_seed": master_seed, "id": instance_id}
        )
    sequence = np.random.SeedSequence([master_seed, instance_id])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def run_ensemble(
    fn: Callable[[T], R], tasks: Sequence[T], workers: int | None = None
) -> list[R]:
    """
    Apply ``fn`` to every task and return results in task order.

    ``workers`` defaults to the configured worker count; one worker runs
    inline without a pool. ``fn`` and the tasks must be picklable otherwise.
    """
    workers = workers if workers is not None else get_settings().effective_workers
    if workers < 1:
        raise ParameterError("workers must be >= 1", {"workers": workers})
    if not tasks:
        return []

    pool_size = min(workers, len(tasks))
    logger.info(f"Running ensemble of {len(tasks)} tasks on {pool_size} worker(s)")
    if pool_size == 1:
        return [fn(task) for task in tasks]

    with ProcessPoolExecutor(max_workers=pool_size) as executor:
        return list(executor.map(fn, tasks))

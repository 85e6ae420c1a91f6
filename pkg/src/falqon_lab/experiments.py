"""
Per-instance experiment tasks and the artifact layout shared by CLI commands.

Task functions are module-level so ensembles can ship them to worker
processes; all file writing happens in the calling process.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from falqon_lab import __version__
from falqon_lab.annealing import (
    AnnealConfig,
    ComparisonRow,
    Threshold,
    compare_with_falqon,
    run_linear_anneal,
)
from falqon_lab.config import Settings
from falqon_lab.ensemble import derive_seed
from falqon_lab.falqon.config import FalqonConfig
from falqon_lab.falqon.runner import run_falqon, run_falqon_iterative
from falqon_lab.falqon.trace import FalqonTrace
from falqon_lab.graphs import Graph, graph_hash
from falqon_lab.metrics import ensemble_summary
from falqon_lab.models import ExperimentConfig, Provenance, RunRecord
from falqon_lab.persistence import write_json, write_summary, write_trace
from falqon_lab.qaoa.models import BfgsOptions, FalqonPlusResult, MultistartStats
from falqon_lab.qaoa.strategies import falqon_plus, multistart_qaoa

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstanceTask:
    """One graph of an ensemble with its derived seed."""

    index: int
    graph: Graph
    seed: int

    @property
    def stem(self) -> str:
        return f"instance_{self.index:03d}"


def build_tasks(graphs: Sequence[Graph], master_seed: int) -> list[InstanceTask]:
    return [
        InstanceTask(index=i, graph=g, seed=derive_seed(master_seed, i))
        for i, g in enumerate(graphs)
    ]


def _seeded(config: FalqonConfig, seed: int) -> FalqonConfig:
    estimator = config.estimator.model_copy(update={"seed": seed})
    return config.model_copy(update={"estimator": estimator})


# ——— Task functions ———


def falqon_task(task: InstanceTask, config: FalqonConfig) -> FalqonTrace:
    return run_falqon(task.graph, _seeded(config, task.seed))


def iterative_task(
    task: InstanceTask, config: FalqonConfig, iterations: int
) -> list[FalqonTrace]:
    return run_falqon_iterative(task.graph, _seeded(config, task.seed), iterations)


def falqon_plus_task(
    task: InstanceTask, layers: int, dt: float, options: BfgsOptions
) -> FalqonPlusResult:
    return falqon_plus(task.graph, layers, dt, options)


def multistart_task(
    task: InstanceTask, layers: int, starts: int, options: BfgsOptions
) -> MultistartStats:
    return multistart_qaoa(task.graph, layers, starts, seed=task.seed, options=options)


def anneal_task(task: InstanceTask, config: AnnealConfig) -> FalqonTrace:
    return run_linear_anneal(task.graph, config)


def compare_task(
    task: InstanceTask, config: FalqonConfig, threshold: Threshold
) -> tuple[FalqonTrace, ComparisonRow, FalqonTrace | None]:
    trace = run_falqon(task.graph, _seeded(config, task.seed))
    row, anneal = compare_with_falqon(task.graph, trace, threshold, config.dt)
    return trace, row, anneal


# ——— Artifacts ———


class ArtifactWriter:
    """Collects artifact paths and instance provenance for ``run.json``."""

    def __init__(self, settings: Settings, experiment: ExperimentConfig) -> None:
        self.settings = settings
        self.output_dir = settings.output_dir
        self.experiment = experiment
        self.artifacts: list[str] = []
        self.instances: list[dict[str, Any]] = []

    def provenance(self, task: InstanceTask | None = None) -> Provenance:
        return Provenance(
            code_version=__version__,
            command=self.experiment.command,
            master_seed=self.experiment.master_seed,
            seed=task.seed if task else None,
            graph_hash=graph_hash(task.graph) if task else None,
            config=self.experiment.parameters,
        )

    def _track(self, *paths: Path) -> None:
        for path in paths:
            self.artifacts.append(path.relative_to(self.output_dir).as_posix())

    def add_instance(self, task: InstanceTask, **extra: Any) -> None:
        self.instances.append(
            {"index": task.index, "seed": task.seed, "graph_hash": graph_hash(task.graph), **extra}
        )

    def trace(self, trace: FalqonTrace, task: InstanceTask, stem: str | None = None) -> None:
        self._track(
            *write_trace(
                trace, self.settings.traces_dir, stem or task.stem, self.provenance(task)
            )
        )

    def summary(self, traces: Sequence[FalqonTrace], name: str = "summary.csv") -> None:
        path = write_summary(ensemble_summary(traces), self.output_dir / name)
        self._track(path)

    def json(self, relative: str, data: Any) -> Path:
        path = write_json(self.output_dir / relative, data)
        self._track(path)
        return path

    def file(self, path: Path) -> None:
        self._track(path)

    def finish(self) -> Path:
        record = RunRecord(
            experiment=self.experiment,
            provenance=self.provenance(),
            artifacts=self.artifacts,
            instances=self.instances,
        )
        path = write_json(self.output_dir / "run.json", record)
        logger.info(f"Wrote {len(self.artifacts)} artifacts under {self.output_dir}")
        return path

"""
Critical time-step scan and stored calibration presets.

The critical dt of a calibration set is the largest step for which every
instance keeps <H_p> monotone over a fixed number of exact layers.
"""

import json
import logging
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from falqon_lab import __version__
from falqon_lab.config import get_settings
from falqon_lab.exceptions import ParameterError, SerializationError
from falqon_lab.falqon.config import FalqonConfig, StopRule
from falqon_lab.falqon.runner import monotonicity_violations, run_falqon
from falqon_lab.graphs import Graph, MaxCutSolution, brute_force_maxcut, graph_hash
from falqon_lab.persistence import atomic_write_text

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 12
MAX_HALVINGS = 30


class DtProbe(BaseModel):
    """One evaluated time step of a scan."""

    dt: float
    monotone: bool
    first_violation: int | None = Field(
        default=None, description="Earliest violating layer over the set"
    )


class CriticalDtScan(BaseModel):
    """Result of ``scan_critical_dt``."""

    dt_critical: float
    layers: int
    probes: list[DtProbe] = Field(default_factory=list)


class CalibrationPreset(BaseModel):
    """Stored critical dt for a graph family."""

    name: str
    dt: float = Field(gt=0)
    layers: int
    n: int
    degree: int | None = None
    weighted: bool = False
    graph_hashes: list[str] = Field(default_factory=list)
    code_version: str = Field(default=__version__)


def _probe(
    graphs: Sequence[Graph], solutions: Sequence[MaxCutSolution], layers: int, dt: float
) -> DtProbe:
    config = FalqonConfig(dt=dt, max_layers=layers, stop=StopRule(enabled=False))
    first: int | None = None
    for graph, solution in zip(graphs, solutions):
        violations = monotonicity_violations(run_falqon(graph, config, solution=solution))
        if violations:
            first = violations[0] if first is None else min(first, violations[0])
    probe = DtProbe(dt=dt, monotone=first is None, first_violation=first)
    logger.debug(f"dt={dt:.6g}: monotone={probe.monotone} first_violation={first}")
    return probe


def scan_critical_dt(
    graphs: Sequence[Graph],
    layers: int = 1000,
    dt_start: float = 0.05,
    refine_steps: int = 8,
) -> CriticalDtScan:
    """
    Bracket the critical dt by doubling (or halving) from ``dt_start`` and
    refine it by bisection; the returned value is the largest monotone probe.
    """
    if not graphs:
        raise ParameterError("calibration set is empty")
    if dt_start <= 0 or layers < 1 or refine_steps < 0:
        raise ParameterError(
            "invalid scan parameters",
            {"dt_start": dt_start, "layers": layers, "refine_steps": refine_steps},
        )

    solutions = [brute_force_maxcut(g) for g in graphs]
    probes: list[DtProbe] = []

    def probe(dt: float) -> bool:
        result = _probe(graphs, solutions, layers, dt)
        probes.append(result)
        return result.monotone

    lo: float | None = None
    hi: float | None = None
    if probe(dt_start):
        lo = dt_start
        for _ in range(MAX_DOUBLINGS):
            candidate = lo * 2
            if probe(candidate):
                lo = candidate
            else:
                hi = candidate
                break
    else:
        hi = dt_start
        for _ in range(MAX_HALVINGS):
            candidate = hi / 2
            if probe(candidate):
                lo = candidate
                break
            hi = candidate
        if lo is None:
            raise ParameterError(
                "no monotone time step found above the halving floor", {"dt_start": dt_start}
            )

    assert lo is not None
    if hi is not None:
        for _ in range(refine_steps):
            mid = 0.5 * (lo + hi)
            if probe(mid):
                lo = mid
            else:
                hi = mid

    logger.info(
        f"Critical dt over {len(graphs)} graphs and {layers} layers: {lo:.6g}",
        extra={"probes": len(probes)},
    )
    return CriticalDtScan(dt_critical=lo, layers=layers, probes=probes)


def build_preset(
    name: str, graphs: Sequence[Graph], scan: CriticalDtScan, degree: int | None = None
) -> CalibrationPreset:
    return CalibrationPreset(
        name=name,
        dt=scan.dt_critical,
        layers=scan.layers,
        n=graphs[0].n,
        degree=degree,
        weighted=not all(g.is_unweighted for g in graphs),
        graph_hashes=[graph_hash(g) for g in graphs],
    )


def _preset_path(name: str, directory: Path | None) -> Path:
    if not name or "/" in name or "\\" in name:
        raise ParameterError("invalid preset name", {"name": name})
    return (directory or get_settings().presets_dir) / f"{name}.json"


def save_calibration_preset(preset: CalibrationPreset, directory: Path | None = None) -> Path:
    path = _preset_path(preset.name, directory)
    atomic_write_text(path, json.dumps(preset.model_dump(mode="json"), indent=2) + "\n")
    logger.info(f"Saved calibration preset {preset.name} (dt={preset.dt:.6g}) to {path}")
    return path


def load_calibration_preset(name: str, directory: Path | None = None) -> CalibrationPreset:
    path = _preset_path(name, directory)
    try:
        return CalibrationPreset.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ParameterError(
            f"no calibration preset named {name!r}; run dt-scan --save-preset first",
            {"path": str(path)},
        ) from e
    except (OSError, ValidationError) as e:
        raise SerializationError(f"cannot read calibration preset {path}: {e}") from e

"""
Command-line front end.

Every subcommand resolves its parameters as explicit flag, then the JSON
``--config`` file, then the built-in default, writes its artifacts under the
output directory together with a ``run.json`` record, and reports failures
as a JSON error on stderr with a category exit code.
"""

import json
import logging
import sys
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Optional, TypeVar

import numpy as np
import typer

from falqon_lab.annealing import AnnealConfig, Threshold
from falqon_lab.config import Settings, get_settings
from falqon_lab.ensemble import derive_seed, run_ensemble
from falqon_lab.exceptions import ParameterError, error_payload, exit_code_for
from falqon_lab.experiments import (
    ArtifactWriter,
    anneal_task,
    build_tasks,
    compare_task,
    falqon_plus_task,
    falqon_task,
    iterative_task,
    multistart_task,
)
from falqon_lab.falqon.calibration import (
    build_preset,
    load_calibration_preset,
    save_calibration_preset,
    scan_critical_dt,
)
from falqon_lab.falqon.config import FalqonConfig, FeedbackLaw, StopRule
from falqon_lab.falqon.runner import (
    beta_sign_alternation,
    linear_reference_schedule,
    monotonicity_violations,
)
from falqon_lab.falqon.trace import FalqonTrace
from falqon_lab.graphs import (
    Graph,
    assign_uniform_weights,
    brute_force_maxcut,
    dedupe_nonisomorphic,
    enumerate_regular_graphs,
    generate_connected_regular_graph,
    graph_hash,
    read_edge_list,
    write_edge_list,
)
from falqon_lab.hamiltonian import operator_norms
from falqon_lab.logging_config import setup_logging
from falqon_lab.measurement import EstimatorConfig, EstimatorMode
from falqon_lab.metrics import check_qlc_convergence_criteria
from falqon_lab.models import ExperimentConfig
from falqon_lab.persistence import read_json, write_rows
from falqon_lab.qaoa.models import BfgsOptions

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="falqon-lab",
    help="Feedback-based quantum optimization experiments for MaxCut.",
    no_args_is_help=True,
    add_completion=False,
)

T = TypeVar("T")

# Weight streams are offset from structure streams so both stay independent
_WEIGHT_STREAM = 1_000_000


@dataclass
class CliState:
    settings: Settings
    workers: int
    file_config: dict[str, Any] = field(default_factory=dict)

    @property
    def output_dir(self) -> Path:
        return self.settings.output_dir

    def pick(self, key: str, flag: T | None, default: T) -> T:
        """Explicit flag, then config file value, then default."""
        if flag is not None:
            return flag
        if key in self.file_config:
            return self.file_config[key]  # type: ignore[no-any-return]
        return default


def _state(ctx: typer.Context) -> CliState:
    if ctx.obj is None:
        settings = get_settings()
        ctx.obj = CliState(settings=settings, workers=settings.effective_workers)
    return ctx.obj  # type: ignore[no-any-return]


def _execute(state: CliState, action: Callable[[], None]) -> None:
    """Run a command body, turning failures into a JSON error and exit code."""
    try:
        state.settings.create_directories()
        action()
    except typer.Exit:
        raise
    except Exception as e:
        payload = error_payload(e)
        sys.stderr.write(payload.model_dump_json() + "\n")
        raise typer.Exit(code=exit_code_for(e)) from e


def _read_config_file(path: Path) -> dict[str, Any]:
    try:
        loaded = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(loaded, dict):
            raise ParameterError("config file must hold a JSON object", {"path": str(path)})
    except (OSError, json.JSONDecodeError, ParameterError) as e:
        error = e if isinstance(e, ParameterError) else ParameterError(f"bad config file: {e}")
        sys.stderr.write(error_payload(error).model_dump_json() + "\n")
        raise typer.Exit(code=exit_code_for(error)) from e
    return loaded


@app.callback()
def main_callback(
    ctx: typer.Context,
    output_dir: Optional[Path] = typer.Option(
        None, "--output-dir", "-o", help="Artifact directory (env FALQON_LAB_OUTPUT_DIR)"
    ),
    workers: Optional[int] = typer.Option(
        None, "--workers", "-w", help="Worker processes (env FALQON_LAB_WORKERS)"
    ),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level"),
    config: Optional[Path] = typer.Option(
        None, "--config", help="JSON file of parameter values; flags take precedence"
    ),
) -> None:
    """Configure logging and shared options."""
    settings = get_settings()
    file_config: dict[str, Any] = {}
    if config is not None:
        file_config = _read_config_file(config)

    resolved_dir = output_dir or file_config.get("output_dir")
    if resolved_dir:
        settings = settings.model_copy(update={"output_dir": Path(resolved_dir)})
    setup_logging(log_level, settings=settings)

    resolved_workers = workers if workers is not None else file_config.get("workers")
    ctx.obj = CliState(
        settings=settings,
        workers=int(resolved_workers) if resolved_workers else settings.effective_workers,
        file_config=file_config,
    )


# ——— Shared option handling ———


def _load_graphs(
    state: CliState, graph: Optional[list[Path]], graphs_dir: Optional[Path]
) -> list[Graph]:
    paths = [Path(p) for p in state.pick("graph", graph or None, [])]
    directory = state.pick("graphs_dir", graphs_dir, None)
    if not paths:
        directory = Path(directory) if directory else state.settings.graphs_dir
        paths = sorted(directory.glob("*.edges"))
    if not paths:
        raise ParameterError("no graphs given; pass --graph or --graphs-dir")
    return [read_edge_list(p) for p in paths]


def _falqon_config(
    state: CliState,
    dt: Optional[float],
    preset: Optional[str],
    layers: Optional[int],
    beta_init: Optional[float],
    gain: Optional[float],
    estimator: Optional[str],
    shots: Optional[int],
    lambda0: Optional[float],
    phi_inst: Optional[bool],
    no_stop: Optional[bool],
) -> FalqonConfig:
    dt_value = state.pick("dt", dt, None)
    preset_name = state.pick("preset", preset, None)
    if dt_value is None:
        if preset_name is None:
            raise ParameterError("no time step: pass --dt or --preset")
        dt_value = load_calibration_preset(preset_name, state.settings.presets_dir).dt
    max_layers = int(state.pick("layers", layers, 100))
    mode = EstimatorMode(state.pick("estimator", estimator, EstimatorMode.EXACT.value))
    lam = state.pick("lambda0", lambda0, None)
    return FalqonConfig(
        dt=float(dt_value),
        max_layers=max_layers,
        beta_init=float(state.pick("beta_init", beta_init, 0.0)),
        law=FeedbackLaw(w=float(state.pick("w", gain, 1.0))),
        reference=linear_reference_schedule(float(lam), max_layers) if lam is not None else None,
        estimator=EstimatorConfig(mode=mode, shots=state.pick("shots", shots, None)),
        stop=StopRule(enabled=not bool(state.pick("no_stop", no_stop, False))),
        record_phi_inst=bool(state.pick("phi_inst", phi_inst, False)),
    )


def _experiment(
    state: CliState, command: str, seed: Optional[int], parameters: dict[str, Any]
) -> ExperimentConfig:
    return ExperimentConfig(
        command=command,
        master_seed=int(state.pick("seed", seed, 0)),
        workers=state.workers,
        parameters=parameters,
    )


GraphOpt = typer.Option(None, "--graph", "-g", help="Edge-list file (repeatable)")
GraphsDirOpt = typer.Option(None, "--graphs-dir", help="Directory of *.edges files")
SeedOpt = typer.Option(None, "--seed", help="Master seed")
DtOpt = typer.Option(None, "--dt", help="Time step per layer")
PresetOpt = typer.Option(None, "--preset", help="Calibration preset name supplying dt")
LayersOpt = typer.Option(None, "--layers", "-l", help="Number of layers")


# ——— Commands ———


@app.command("gen-graphs")
def gen_graphs(
    ctx: typer.Context,
    n: Optional[int] = typer.Option(None, "--n", help="Vertices"),
    degree: Optional[int] = typer.Option(None, "--degree", "-d", help="Regular degree"),
    count: Optional[str] = typer.Option(None, "--count", help="Number of graphs or 'all'"),
    dedupe: Optional[bool] = typer.Option(
        None, "--dedupe/--no-dedupe", help="Drop isomorphic duplicates"
    ),
    weighted: Optional[bool] = typer.Option(
        None, "--weighted/--unweighted", help="Uniform (0, 1] edge weights"
    ),
    seed: Optional[int] = SeedOpt,
) -> None:
    """Generate connected regular graphs as edge-list files."""
    state = _state(ctx)

    def action() -> None:
        n_value = int(state.pick("n", n, 8))
        d_value = int(state.pick("degree", degree, 3))
        count_value = str(state.pick("count", count, "all"))
        dedupe_value = bool(state.pick("dedupe", dedupe, True))
        weighted_value = bool(state.pick("weighted", weighted, False))
        experiment = _experiment(
            state,
            "gen-graphs",
            seed,
            {
                "n": n_value,
                "degree": d_value,
                "count": count_value,
                "dedupe": dedupe_value,
                "weighted": weighted_value,
            },
        )
        master = experiment.master_seed or 0

        if count_value == "all":
            graphs = dedupe_nonisomorphic(enumerate_regular_graphs(n_value, d_value))
        else:
            try:
                total = int(count_value)
            except ValueError as e:
                raise ParameterError("--count must be an integer or 'all'") from e
            graphs = [
                generate_connected_regular_graph(n_value, d_value, derive_seed(master, i))
                for i in range(total)
            ]
            if dedupe_value:
                graphs = dedupe_nonisomorphic(graphs)
        if weighted_value:
            graphs = [
                assign_uniform_weights(g, derive_seed(master, _WEIGHT_STREAM + i))
                for i, g in enumerate(graphs)
            ]

        writer = ArtifactWriter(state.settings, experiment)
        for i, graph in enumerate(graphs):
            path = state.settings.graphs_dir / f"graph_{i:03d}.edges"
            write_edge_list(graph, path)
            writer.file(path)
            writer.instances.append({"index": i, "graph_hash": graph_hash(graph)})
        writer.finish()
        typer.echo(f"{len(graphs)} graphs written to {state.settings.graphs_dir}")

    _execute(state, action)


@app.command("falqon")
def falqon(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    dt: Optional[float] = DtOpt,
    preset: Optional[str] = PresetOpt,
    layers: Optional[int] = LayersOpt,
    seed: Optional[int] = SeedOpt,
    beta_init: Optional[float] = typer.Option(None, "--beta-init", help="beta_1"),
    gain: Optional[float] = typer.Option(None, "--w", help="Feedback gain w"),
    estimator: Optional[str] = typer.Option(
        None, "--estimator", help="exact | pauli_shots | full_multinomial"
    ),
    shots: Optional[int] = typer.Option(None, "--shots", help="Samples per estimate"),
    lambda0: Optional[float] = typer.Option(
        None, "--lambda0", help="Linearly decaying reference schedule starting value"
    ),
    phi_inst: Optional[bool] = typer.Option(
        None, "--phi-inst/--no-phi-inst", help="Record instantaneous ground-state overlap"
    ),
    no_stop: Optional[bool] = typer.Option(
        None, "--no-stop/--stop", help="Disable the convergence stop rule"
    ),
) -> None:
    """Run the feedback loop on every graph and write traces plus a summary."""
    state = _state(ctx)

    def action() -> None:
        graphs = _load_graphs(state, graph, graphs_dir)
        config = _falqon_config(
            state,
            dt,
            preset,
            layers,
            beta_init,
            gain,
            estimator,
            shots,
            lambda0,
            phi_inst,
            no_stop,
        )
        experiment = _experiment(state, "falqon", seed, config.model_dump(mode="json"))
        tasks = build_tasks(graphs, experiment.master_seed or 0)
        traces = run_ensemble(partial(falqon_task, config=config), tasks, state.workers)

        writer = ArtifactWriter(state.settings, experiment)
        for task, trace in zip(tasks, traces):
            writer.trace(trace, task)
            writer.add_instance(
                task,
                terminated_at=trace.terminated_at,
                termination_reason=trace.termination_reason.value,
            )
        writer.summary(traces)
        writer.finish()
        typer.echo(f"{len(traces)} traces written to {state.settings.traces_dir}")

    _execute(state, action)


@app.command("falqon-iter")
def falqon_iter(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    dt: Optional[float] = DtOpt,
    preset: Optional[str] = PresetOpt,
    layers: Optional[int] = LayersOpt,
    iterations: Optional[int] = typer.Option(None, "--iterations", "-J", help="Iterations J"),
    seed: Optional[int] = SeedOpt,
) -> None:
    """Iteratively refine the schedule, using each iteration as the next reference."""
    state = _state(ctx)

    def action() -> None:
        graphs = _load_graphs(state, graph, graphs_dir)
        config = _falqon_config(
            state, dt, preset, layers, None, None, None, None, None, None, True
        )
        j_total = int(state.pick("iterations", iterations, 3))
        parameters = {**config.model_dump(mode="json"), "iterations": j_total}
        experiment = _experiment(state, "falqon-iter", seed, parameters)
        tasks = build_tasks(graphs, experiment.master_seed or 0)
        results = run_ensemble(
            partial(iterative_task, config=config, iterations=j_total), tasks, state.workers
        )

        writer = ArtifactWriter(state.settings, experiment)
        for task, traces in zip(tasks, results):
            for j, trace in enumerate(traces):
                writer.trace(trace, task, stem=f"{task.stem}_iter{j}")
            writer.add_instance(
                task,
                final_E_p=[t.final_E_p for t in traces],
                final_phi=[t.final_phi for t in traces],
            )
        for j in range(j_total):
            writer.summary([traces[j] for traces in results], name=f"summary_iter{j}.csv")
        writer.finish()

    _execute(state, action)


def _bfgs_options(
    state: CliState, max_iters: Optional[int], grad_tol: Optional[float]
) -> BfgsOptions:
    return BfgsOptions(
        max_iters=int(state.pick("max_iters", max_iters, 500)),
        grad_tol=float(state.pick("grad_tol", grad_tol, 1e-6)),
    )


@app.command("falqon-plus")
def falqon_plus_cmd(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    dt: Optional[float] = DtOpt,
    preset: Optional[str] = PresetOpt,
    layers: Optional[int] = LayersOpt,
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="BFGS iteration cap"),
    grad_tol: Optional[float] = typer.Option(None, "--grad-tol", help="BFGS gradient tolerance"),
    seed: Optional[int] = SeedOpt,
) -> None:
    """Seed QAOA with a FALQON schedule and optimize it with BFGS."""
    state = _state(ctx)

    def action() -> None:
        graphs = _load_graphs(state, graph, graphs_dir)
        config = _falqon_config(
            state, dt, preset, layers, None, None, None, None, None, None, True
        )
        options = _bfgs_options(state, max_iters, grad_tol)
        parameters = {"dt": config.dt, "layers": config.max_layers, **options.model_dump()}
        experiment = _experiment(state, "falqon-plus", seed, parameters)
        tasks = build_tasks(graphs, experiment.master_seed or 0)
        results = run_ensemble(
            partial(falqon_plus_task, layers=config.max_layers, dt=config.dt, options=options),
            tasks,
            state.workers,
        )

        writer = ArtifactWriter(state.settings, experiment)
        rows = []
        for task, result in zip(tasks, results):
            writer.json(f"falqon_plus/{task.stem}.json", result)
            history = write_rows(
                state.output_dir / "falqon_plus" / f"{task.stem}_history.csv",
                ("iter", "energy", "grad_norm", "step"),
                [h.model_dump() for h in result.history],
            )
            writer.file(history)
            writer.add_instance(task)
            rows.append(
                {
                    "instance": task.index,
                    "falqon_r_A": result.falqon_r_A,
                    "r_A": result.r_A,
                    "falqon_phi": result.falqon_phi,
                    "phi": result.phi,
                    "iterations": result.iterations,
                    "converged": result.converged,
                }
            )
        columns = ("instance", "falqon_r_A", "r_A", "falqon_phi", "phi", "iterations", "converged")
        writer.file(write_rows(state.output_dir / "falqon_plus" / "summary.csv", columns, rows))
        writer.finish()

    _execute(state, action)


@app.command("qaoa-multistart")
def qaoa_multistart(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    layers: Optional[int] = LayersOpt,
    starts: Optional[int] = typer.Option(None, "--starts", help="Random initializations"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="BFGS iteration cap"),
    grad_tol: Optional[float] = typer.Option(None, "--grad-tol", help="BFGS gradient tolerance"),
    seed: Optional[int] = SeedOpt,
) -> None:
    """Optimize QAOA from random starts and report max/median/min r_A and phi."""
    state = _state(ctx)

    def action() -> None:
        graphs = _load_graphs(state, graph, graphs_dir)
        options = _bfgs_options(state, max_iters, grad_tol)
        layer_count = int(state.pick("layers", layers, 10))
        start_count = int(state.pick("starts", starts, 20))
        parameters = {"layers": layer_count, "starts": start_count, **options.model_dump()}
        experiment = _experiment(state, "qaoa-multistart", seed, parameters)
        tasks = build_tasks(graphs, experiment.master_seed or 0)
        results = run_ensemble(
            partial(multistart_task, layers=layer_count, starts=start_count, options=options),
            tasks,
            state.workers,
        )

        writer = ArtifactWriter(state.settings, experiment)
        rows = []
        for task, stats in zip(tasks, results):
            writer.json(f"multistart/{task.stem}.json", stats)
            writer.add_instance(task)
            rows.append(
                {"instance": task.index, **stats.model_dump(exclude={"results"})}
            )
        columns = (
            "instance",
            "max_r_A",
            "median_r_A",
            "min_r_A",
            "max_phi",
            "median_phi",
            "min_phi",
        )
        writer.file(write_rows(state.output_dir / "multistart" / "summary.csv", columns, rows))
        writer.finish()

    _execute(state, action)


@app.command("anneal")
def anneal(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    total_time: Optional[float] = typer.Option(None, "--T", help="Annealing time T"),
    dt: Optional[float] = DtOpt,
    seed: Optional[int] = SeedOpt,
) -> None:
    """Digitized linear annealing on every graph."""
    state = _state(ctx)

    def action() -> None:
        graphs = _load_graphs(state, graph, graphs_dir)
        config = AnnealConfig(
            T=float(state.pick("T", total_time, 10.0)), dt=float(state.pick("dt", dt, 0.05))
        )
        experiment = _experiment(state, "anneal", seed, config.model_dump(mode="json"))
        tasks = build_tasks(graphs, experiment.master_seed or 0)
        traces = run_ensemble(partial(anneal_task, config=config), tasks, state.workers)

        writer = ArtifactWriter(state.settings, experiment)
        for task, trace in zip(tasks, traces):
            writer.trace(trace, task, stem=f"{task.stem}_anneal")
            writer.add_instance(task)
        writer.summary(traces, name="summary_anneal.csv")
        writer.finish()

    _execute(state, action)


@app.command("compare")
def compare(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    against: Optional[str] = typer.Option(None, "--against", help="Baseline (anneal)"),
    threshold: Optional[str] = typer.Option(None, "--threshold", help="e.g. rA=0.932"),
    dt: Optional[float] = DtOpt,
    preset: Optional[str] = PresetOpt,
    layers: Optional[int] = LayersOpt,
    seed: Optional[int] = SeedOpt,
) -> None:
    """Compare FALQON with linear annealing at FALQON's threshold-crossing time."""
    state = _state(ctx)

    def action() -> None:
        baseline = state.pick("against", against, "anneal")
        if baseline != "anneal":
            raise ParameterError("only --against anneal is supported", {"against": baseline})
        criterion = Threshold.parse(str(state.pick("threshold", threshold, "rA=0.932")))
        graphs = _load_graphs(state, graph, graphs_dir)
        config = _falqon_config(
            state, dt, preset, layers, None, None, None, None, None, None, True
        )
        parameters = {
            **config.model_dump(mode="json"),
            "against": baseline,
            "threshold": criterion.model_dump(),
        }
        experiment = _experiment(state, "compare", seed, parameters)
        tasks = build_tasks(graphs, experiment.master_seed or 0)
        results = run_ensemble(
            partial(compare_task, config=config, threshold=criterion), tasks, state.workers
        )

        writer = ArtifactWriter(state.settings, experiment)
        rows = []
        for task, (trace, row, annealed) in zip(tasks, results):
            writer.trace(trace, task, stem=f"{task.stem}_falqon")
            if annealed is not None:
                writer.trace(annealed, task, stem=f"{task.stem}_anneal")
            writer.add_instance(task)
            rows.append({"instance": task.index, **row.model_dump()})
        columns = (
            "instance",
            "graph_hash",
            "T",
            "falqon_r_A",
            "anneal_r_A",
            "falqon_phi",
            "anneal_phi",
        )
        writer.file(write_rows(state.output_dir / "compare_summary.csv", columns, rows))
        writer.finish()

    _execute(state, action)


@app.command("dt-scan")
def dt_scan(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    layers: Optional[int] = LayersOpt,
    dt_start: Optional[float] = typer.Option(None, "--dt-start", help="First probed dt"),
    refine_steps: Optional[int] = typer.Option(None, "--refine-steps", help="Bisection steps"),
    save_preset: Optional[str] = typer.Option(
        None, "--save-preset", help="Store the result as a named calibration preset"
    ),
    seed: Optional[int] = SeedOpt,
) -> None:
    """Find the largest dt keeping every graph monotone over the given layers."""
    state = _state(ctx)

    def action() -> None:
        graphs = _load_graphs(state, graph, graphs_dir)
        parameters = {
            "layers": int(state.pick("layers", layers, 1000)),
            "dt_start": float(state.pick("dt_start", dt_start, 0.05)),
            "refine_steps": int(state.pick("refine_steps", refine_steps, 8)),
        }
        experiment = _experiment(state, "dt-scan", seed, parameters)
        scan = scan_critical_dt(graphs, **parameters)

        writer = ArtifactWriter(state.settings, experiment)
        writer.json("dt_scan.json", scan)
        preset_name = state.pick("save_preset", save_preset, None)
        if preset_name:
            degrees = {int(d) for g in graphs for d in g.degrees()}
            degree = degrees.pop() if len(degrees) == 1 else None
            preset = build_preset(preset_name, graphs, scan, degree)
            writer.file(save_calibration_preset(preset, state.settings.presets_dir))
        writer.finish()
        typer.echo(f"dt_critical = {scan.dt_critical:.17g}")

    _execute(state, action)


def _finite_min(values: np.ndarray) -> float | None:
    finite = values[np.isfinite(values)]
    return float(finite.min()) if finite.size else None


@app.command("diagnose")
def diagnose(
    ctx: typer.Context,
    graph: Optional[list[Path]] = GraphOpt,
    graphs_dir: Optional[Path] = GraphsDirOpt,
    trace: Optional[list[Path]] = typer.Option(
        None, "--trace", help="Trace JSON to check for monotonicity and beta oscillation"
    ),
) -> None:
    """Report MaxCut optima, operator norms, convergence criteria and trace pathologies."""
    state = _state(ctx)

    def action() -> None:
        report: dict[str, Any] = {"graphs": [], "traces": []}
        trace_paths = [Path(p) for p in state.pick("trace", trace or None, [])]
        if graph or graphs_dir or state.file_config.get("graph") or not trace_paths:
            for g in _load_graphs(state, graph, graphs_dir):
                n_p, n_d = operator_norms(g)
                entry: dict[str, Any] = {
                    "graph_hash": graph_hash(g),
                    "n": g.n,
                    "edges": g.num_edges,
                    "solution": brute_force_maxcut(g).to_dict(),
                    "n_p": n_p,
                    "n_d": n_d,
                }
                if g.n <= state.settings.max_criteria_qubits:
                    entry["criteria"] = check_qlc_convergence_criteria(g).model_dump()
                report["graphs"].append(entry)
        for path in trace_paths:
            record = read_json(path)
            loaded = FalqonTrace.from_dict(record.get("trace", record))
            violations = monotonicity_violations(loaded)
            report["traces"].append(
                {
                    "path": path.as_posix(),
                    "layers": loaded.terminated_at,
                    "monotonicity_violations": violations[:50],
                    "violation_count": len(violations),
                    "beta_sign_alternation": beta_sign_alternation(loaded),
                    "min_dt_bound": _finite_min(loaded.dt_bound),
                }
            )
        experiment = _experiment(state, "diagnose", None, {})
        writer = ArtifactWriter(state.settings, experiment)
        writer.json("diagnose.json", report)
        writer.finish()
        typer.echo(json.dumps(report, indent=2, sort_keys=True))

    _execute(state, action)

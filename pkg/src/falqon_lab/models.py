"""Pydantic models shared across falqon-lab artifacts."""

from typing import Any

from pydantic import BaseModel, Field

from falqon_lab import __version__

# ——— Error models ———


class ErrorResponse(BaseModel):
    """Machine-readable error written by the CLI on failure."""

    error: str = Field(description="Error type")
    category: str = Field(description="Exit category (usage, capacity, numerical)")
    exit_code: int = Field(description="Process exit status")
    message: str = Field(description="Error message")
    details: dict[str, Any] | None = Field(
        default=None, description="Additional error details"
    )


# ——— Provenance models ———


class Provenance(BaseModel):
    """Reproducibility block embedded in every artifact."""

    code_version: str = Field(default=__version__, description="Package version")
    command: str = Field(description="Subcommand or API entry point")
    master_seed: int | None = Field(default=None, description="Ensemble master seed")
    seed: int | None = Field(default=None, description="Per-run derived seed")
    graph_hash: str | None = Field(default=None, description="sha256 of the edge list")
    config: dict[str, Any] = Field(default_factory=dict, description="Config echo")


class SummaryRow(BaseModel):
    """One layer of an ensemble summary."""

    layer: int
    count: int
    r_A_mean: float
    r_A_std: float
    phi_mean: float
    phi_std: float


# ——— Experiment models ———


class ExperimentConfig(BaseModel):
    """Resolved parameters of one CLI invocation (flags over file over defaults)."""

    command: str = Field(description="Subcommand name")
    master_seed: int | None = Field(default=None, description="Ensemble master seed")
    workers: int = Field(default=1, description="Worker processes used")
    parameters: dict[str, Any] = Field(
        default_factory=dict, description="Command-specific parameters"
    )


class RunRecord(BaseModel):
    """Contents of ``run.json`` written next to a command's artifacts."""

    experiment: ExperimentConfig
    provenance: Provenance
    artifacts: list[str] = Field(default_factory=list, description="Relative artifact paths")
    instances: list[dict[str, Any]] = Field(
        default_factory=list, description="Per-instance seeds and graph hashes"
    )

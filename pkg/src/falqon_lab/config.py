"""Configuration management for falqon-lab."""

import logging
import os
from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Process-wide settings, overridable through ``FALQON_LAB_*`` variables."""

    model_config = SettingsConfigDict(env_file=".env", env_prefix="FALQON_LAB_")

    # ——— Application settings ———
    log_level: str = Field(default="INFO", description="Logging level")
    log_to_file: bool = Field(
        default=False, description="Also write JSON logs under the output directory"
    )

    # ——— Directory paths ———
    output_dir: Path = Field(
        default_factory=lambda: Path("runs"),
        description="Base directory for traces, summaries and graph files",
    )

    @property
    def traces_dir(self) -> Path:
        """Directory for per-instance trace files."""
        return self.output_dir / "traces"

    @property
    def graphs_dir(self) -> Path:
        """Directory for generated edge-list files."""
        return self.output_dir / "graphs"

    @property
    def presets_dir(self) -> Path:
        """Directory for critical-dt calibration presets."""
        return self.output_dir / "presets"

    @property
    def logs_dir(self) -> Path:
        """Directory for log files."""
        return self.output_dir / "logs"

    def create_directories(self) -> None:
        """Create all output directories if they don't exist."""
        directories = [
            self.output_dir,
            self.traces_dir,
            self.graphs_dir,
            self.presets_dir,
            self.logs_dir,
        ]

        for directory in directories:
            try:
                directory.mkdir(parents=True, exist_ok=True)
                logger.debug(f"Ensured directory exists: {directory}")
            except OSError as e:
                logger.error(f"Failed to create directory {directory}: {e}")
                raise

    # ——— Execution settings ———
    workers: int | None = Field(
        default=None, description="Worker processes for ensembles (None = all CPUs)"
    )

    @property
    def effective_workers(self) -> int:
        """Worker count with the available-parallelism default resolved."""
        if self.workers is not None and self.workers > 0:
            return self.workers
        return os.cpu_count() or 1

    # ——— Capacity ceilings (qubits) ———
    max_statevector_qubits: int = Field(default=24)
    max_multinomial_qubits: int = Field(default=14)
    max_overlap_qubits: int = Field(default=12)
    max_criteria_qubits: int = Field(default=10)
    max_bruteforce_vertices: int = Field(default=24)


@lru_cache
def get_settings() -> Settings:
    """Get cached application settings."""
    return Settings()

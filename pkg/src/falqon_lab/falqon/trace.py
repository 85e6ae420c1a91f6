"""Per-layer record of a FALQON run and its CSV/JSON renderings."""

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from falqon_lab.exceptions import SerializationError
from falqon_lab.simulator import StateVector

CSV_COLUMNS = ("layer", "beta", "A", "E_p", "r_A", "phi", "phi_inst")

_OPTIONAL_ARRAYS = ("phi_inst", "nu", "E_ref", "driver_beta", "driver_A")


class TerminationReason(str, Enum):
    MAX_LAYERS = "max_layers"
    CONVERGED = "converged"


def _fmt(value: float) -> str:
    return f"{value:.17g}"


@dataclass
class FalqonTrace:
    """
    Arrays are indexed by executed layer; ``layers`` holds the layer labels
    (1..l for the base loop, 0..l when a reference slot is present).

    ``beta[i]`` is the driver coefficient applied in layer ``layers[i]`` and
    ``A[i]``, ``E_p[i]`` are measured after it.
    """

    layers: np.ndarray
    beta: np.ndarray
    A: np.ndarray
    E_p: np.ndarray
    r_A: np.ndarray
    phi: np.ndarray
    dt_bound: np.ndarray
    terminated_at: int
    termination_reason: TerminationReason
    min_energy: float
    initial_A: float
    initial_E_p: float
    next_beta: float
    final_state: StateVector | None = None
    phi_inst: np.ndarray | None = None
    nu: np.ndarray | None = None
    E_ref: np.ndarray | None = None
    driver_beta: np.ndarray | None = None
    driver_A: np.ndarray | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lengths = {len(self.layers), len(self.beta), len(self.A), len(self.E_p)}
        lengths |= {len(self.r_A), len(self.phi), len(self.dt_bound)}
        if lengths != {self.terminated_at}:
            raise SerializationError(
                "trace arrays must share length terminated_at",
                {"lengths": sorted(lengths), "terminated_at": self.terminated_at},
            )

    @property
    def applied_beta(self) -> np.ndarray:
        """Driver angle coefficient actually applied (nu in reference mode)."""
        return self.nu if self.nu is not None else self.beta

    @property
    def final_r_A(self) -> float:
        return float(self.r_A[-1])

    @property
    def final_phi(self) -> float:
        return float(self.phi[-1])

    @property
    def final_E_p(self) -> float:
        return float(self.E_p[-1])

    # ——— Export ———

    def to_csv(self) -> str:
        """CSV with header ``layer,beta,A,E_p,r_A,phi,phi_inst``."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for i in range(self.terminated_at):
            phi_inst = "" if self.phi_inst is None else _fmt(self.phi_inst[i])
            writer.writerow(
                [
                    int(self.layers[i]),
                    _fmt(self.beta[i]),
                    _fmt(self.A[i]),
                    _fmt(self.E_p[i]),
                    _fmt(self.r_A[i]),
                    _fmt(self.phi[i]),
                    phi_inst,
                ]
            )
        return buffer.getvalue()

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "layers": self.layers.tolist(),
            "beta": self.beta.tolist(),
            "A": self.A.tolist(),
            "E_p": self.E_p.tolist(),
            "r_A": self.r_A.tolist(),
            "phi": self.phi.tolist(),
            "dt_bound": self.dt_bound.tolist(),
            "terminated_at": self.terminated_at,
            "termination_reason": self.termination_reason.value,
            "min_energy": self.min_energy,
            "initial_A": self.initial_A,
            "initial_E_p": self.initial_E_p,
            "next_beta": self.next_beta,
            "metadata": self.metadata,
        }
        for name in _OPTIONAL_ARRAYS:
            value = getattr(self, name)
            if value is not None:
                data[name] = value.tolist()
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FalqonTrace":
        """Rebuild a trace from ``to_dict`` output (the final state is not stored)."""
        try:
            optional = {
                name: np.asarray(data[name], dtype=float)
                for name in _OPTIONAL_ARRAYS
                if data.get(name) is not None
            }
            return cls(
                layers=np.asarray(data["layers"], dtype=int),
                beta=np.asarray(data["beta"], dtype=float),
                A=np.asarray(data["A"], dtype=float),
                E_p=np.asarray(data["E_p"], dtype=float),
                r_A=np.asarray(data["r_A"], dtype=float),
                phi=np.asarray(data["phi"], dtype=float),
                dt_bound=np.asarray(data["dt_bound"], dtype=float),
                terminated_at=int(data["terminated_at"]),
                termination_reason=TerminationReason(data["termination_reason"]),
                min_energy=float(data["min_energy"]),
                initial_A=float(data["initial_A"]),
                initial_E_p=float(data["initial_E_p"]),
                next_beta=float(data["next_beta"]),
                metadata=dict(data.get("metadata", {})),
                **optional,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SerializationError(f"malformed trace record: {e}") from e

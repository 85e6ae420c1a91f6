"""
Configuration for FALQON runs: feedback law, stopping rule and run parameters.
"""

import logging
from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from falqon_lab.measurement import EstimatorConfig
from falqon_lab.simulator import InitialState

logger = logging.getLogger(__name__)

# |lambda_l| above this share of max|lambda| is reported as a non-decaying reference
REFERENCE_TAIL_TOLERANCE = 1e-3


class FeedbackLaw(BaseModel):
    """beta = -w * f(A) with the linear response f(A) = A."""

    kind: Literal["linear"] = "linear"
    w: float = Field(default=1.0, gt=0, description="Feedback gain")

    def beta(self, a_value: float, w: float | None = None) -> float:
        return -(self.w if w is None else w) * a_value


class StopRule(BaseModel):
    """Stop once |E_p(k) - E_p(k - window)| < epsilon."""

    enabled: bool = Field(default=True)
    epsilon: float | None = Field(
        default=None, gt=0, description="Absolute tolerance; defaults to 1e-6 * ||H_p||"
    )
    window: int = Field(default=10, ge=1)

    def tolerance(self, n_p: float) -> float:
        return self.epsilon if self.epsilon is not None else 1e-6 * n_p


class FalqonConfig(BaseModel):
    """Parameters of a single feedback run."""

    dt: float = Field(gt=0, description="Time step per layer")
    max_layers: int = Field(ge=1, description="Number of layers l")
    beta_init: float = Field(default=0.0, description="Driver coefficient of the first layer")
    law: FeedbackLaw = Field(default_factory=FeedbackLaw)
    reference: list[float] | None = Field(
        default=None, description="Reference schedule lambda_0..lambda_l"
    )
    estimator: EstimatorConfig = Field(default_factory=EstimatorConfig)
    stop: StopRule = Field(default_factory=StopRule)
    initial_state: InitialState = Field(default=InitialState.DRIVER_GROUND)
    record_phi_inst: bool = Field(
        default=False, description="Record the instantaneous ground-state overlap"
    )

    @field_validator("initial_state")
    @classmethod
    def _preparable(cls, value: InitialState) -> InitialState:
        if value in (InitialState.BASIS, InitialState.CUSTOM):
            raise ValueError("basis and custom initial states are passed to the runner directly")
        return value

    @model_validator(mode="after")
    def _reference_guidance(self) -> "FalqonConfig":
        if self.reference:
            scale = max(abs(v) for v in self.reference)
            if abs(self.reference[-1]) > REFERENCE_TAIL_TOLERANCE * scale:
                logger.warning(
                    f"Reference schedule does not decay to zero "
                    f"(lambda_l={self.reference[-1]:.3g}, max={scale:.3g})"
                )
        return self

    @property
    def layer_count(self) -> int:
        """Layers executed without early stop: l, or l + 1 with a reference slot."""
        return self.max_layers + 1 if self.reference is not None else self.max_layers

"""falqon-lab: statevector experiments with feedback-based quantum optimization for MaxCut."""

__version__ = "0.1.0"

from .main import main

__all__ = ["__version__", "main"]

"""Attention-driven LPLC2 looming detection and escape control for small robots."""

from alvs.params import FsmConfig, ModelParams
from alvs.pipeline import Pipeline

__all__ = ["FsmConfig", "ModelParams", "Pipeline"]
__version__ = "0.1.0"

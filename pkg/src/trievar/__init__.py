"""Exact moments, simulation and Mellin-type asymptotics for digital tree statistics."""
from .model import (
    ModelError,
    SplitModel,
    StatKind,
    StatisticSpec,
    TollSpec,
    golden_model,
    make_model,
    symmetric_model,
    toll_for,
)

__version__ = "0.1.0"

__all__ = [
    "ModelError",
    "SplitModel",
    "StatKind",
    "StatisticSpec",
    "TollSpec",
    "golden_model",
    "make_model",
    "symmetric_model",
    "toll_for",
    "__version__",
]

"""Model interface and the builtin linear, Davis-Skodje and Michaelis-Menten systems."""

from app.ops.models.base import FlowCoefficients, ModelSpec
from app.ops.models.custom import CustomModel
from app.ops.models.davis_skodje import DavisSkodjeModel, DavisSkodjeParams
from app.ops.models.linear import LinearModel, LinearModelParams
from app.ops.models.michaelis_menten import (
    Eps2Grouping,
    FastSign,
    MichaelisMentenModel,
    MichaelisMentenParams,
)
from app.ops.models.registry import BUILTIN_MODELS, build_model

__all__ = [
    "BUILTIN_MODELS",
    "CustomModel",
    "DavisSkodjeModel",
    "DavisSkodjeParams",
    "Eps2Grouping",
    "FastSign",
    "FlowCoefficients",
    "LinearModel",
    "LinearModelParams",
    "MichaelisMentenModel",
    "MichaelisMentenParams",
    "ModelSpec",
    "build_model",
]

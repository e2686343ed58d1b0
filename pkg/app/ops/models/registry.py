from collections.abc import Callable
from typing import Any

import numpy as np

from app.lib.errors import ConfigError, UnknownModel
from app.ops.models.base import ModelSpec
from app.ops.models.davis_skodje import DavisSkodjeModel, DavisSkodjeParams
from app.ops.models.linear import LinearModel, LinearModelParams
from app.ops.models.michaelis_menten import MichaelisMentenModel, MichaelisMentenParams


def _linear(
    matrix: list[list[float]] | None = None,
    eigenvalues: list[float] | None = None,
    eigenvectors: list[list[float]] | None = None,
    **_: Any,
) -> ModelSpec:
    if matrix is not None:
        return LinearModel(LinearModelParams.from_matrix(np.asarray(matrix, dtype=float)))
    if eigenvalues is not None:
        vectors = np.eye(len(eigenvalues)) if eigenvectors is None else np.asarray(eigenvectors, dtype=float).T
        return LinearModel(LinearModelParams.from_eigenpairs(eigenvalues, vectors))
    raise ConfigError("The linear model needs either 'matrix' or 'eigenvalues'")


def _gamma(gamma: float | None) -> float:
    if gamma is None:
        raise ConfigError("This model needs 'gamma'")
    return gamma


def _davis_skodje(gamma: float | None = None, **_: Any) -> ModelSpec:
    return DavisSkodjeModel(DavisSkodjeParams(_gamma(gamma)))


def _michaelis_menten(gamma: float | None = None, fast_sign: str | None = None, **_: Any) -> ModelSpec:
    params = MichaelisMentenParams(_gamma(gamma), fast_sign or "critical_manifold_consistent")
    return MichaelisMentenModel(params)


BUILTIN_MODELS: dict[str, Callable[..., ModelSpec]] = {
    "linear": _linear,
    "davis-skodje": _davis_skodje,
    "michaelis-menten": _michaelis_menten,
}


def build_model(model_id: str, **params: Any) -> ModelSpec:
    """
    Build a builtin model by string id.

    Eigenvectors for the linear model are given row-wise (one vector per row).
    """
    try:
        factory = BUILTIN_MODELS[model_id]
    except KeyError:
        raise UnknownModel(f"Unknown model '{model_id}', expected one of {sorted(BUILTIN_MODELS)}") from None
    return factory(**{k: v for k, v in params.items() if v is not None})

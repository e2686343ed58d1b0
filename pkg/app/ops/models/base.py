import logging
from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from app.config import get_settings
from app.lib.errors import NoClosedForm, NoFixedPointFound, NoSimGraph, SingularState
from app.ops.entities.spectrum import SpectralLine
from app.ops.entities.time import ComplexTimePoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowCoefficients:
    """Integration constants of a closed-form solution (c₁, c₂ for Davis-Skodje, α_k for the linear model)."""

    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=complex))


class ModelSpec(ABC):
    """
    A holomorphic vector field F̃ on a complex domain together with its Jacobian.

    Subclasses implement `_field` and `_jacobian` as formulas valid for complex
    arguments; the public `eval_*` methods add the singular-locus check and keep
    real inputs real. Instances are immutable after construction.
    """

    has_closed_form: bool = False
    has_sim_graph: bool = False

    def __init__(self, name: str, dim: int, params: Mapping[str, float] | None = None):
        if dim < 1:
            raise ValueError(f"Model dimension must be positive, got {dim}")
        self.name = name
        self.dim = dim
        self.params = MappingProxyType(dict(params or {}))

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"<{type(self).__name__}(name={self.name}, dim={self.dim}, {params})>"

    @abstractmethod
    def _field(self, z: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _jacobian(self, z: np.ndarray) -> np.ndarray: ...

    def singular_locus_test(self, z: np.ndarray) -> bool:
        return False

    def _as_state(self, state) -> np.ndarray:
        z = np.asarray(state, dtype=complex).reshape(-1)
        if z.shape != (self.dim,):
            raise ValueError(f"{self.name} expects a state of dimension {self.dim}, got {z.shape[0]}")
        return z

    def _checked(self, state) -> np.ndarray:
        z = self._as_state(state)
        if self.singular_locus_test(z):
            raise SingularState(f"{self.name}: state {z} lies on the singular locus")
        return z

    def eval_field(self, state) -> np.ndarray:
        z = self._checked(state)
        # Real states are evaluated in real arithmetic so the result is exactly real.
        if not np.any(z.imag):
            return np.asarray(self._field(z.real), dtype=complex)
        return np.asarray(self._field(z), dtype=complex)

    def eval_jacobian(self, state) -> np.ndarray:
        z = self._checked(state)
        if not np.any(z.imag):
            return np.asarray(self._jacobian(z.real), dtype=complex)
        return np.asarray(self._jacobian(z), dtype=complex)

    def closed_form_solution(self, coeffs: FlowCoefficients, t: "complex | ComplexTimePoint") -> np.ndarray:
        raise NoClosedForm(f"{self.name} has no closed-form solution")

    def fit_coefficients(self, z0) -> FlowCoefficients:
        raise NoClosedForm(f"{self.name} has no closed-form solution")

    def sim_graph(self, z1: float, order: int = 0) -> float:
        raise NoSimGraph(f"{self.name} has no SIM graph")

    def analytic_spectrum(self, coeffs: FlowCoefficients, amp_floor: float | None = None) -> list[SpectralLine]:
        raise NoClosedForm(f"{self.name} has no closed-form solution, so no analytic spectrum")

    def check_jacobian(self, state, h: float = 1e-6) -> float:
        """Relative max-norm discrepancy between eval_jacobian and central finite differences."""
        z = self._checked(state)
        J = self.eval_jacobian(z)
        fd = np.empty_like(J)
        for k in range(self.dim):
            step = h * max(1.0, abs(z[k]))
            e = np.zeros(self.dim, dtype=complex)
            e[k] = step
            fd[:, k] = (self.eval_field(z + e) - self.eval_field(z - e)) / (2 * step)
        scale = max(np.max(np.abs(J)), np.finfo(float).tiny)
        return float(np.max(np.abs(J - fd)) / scale)

    def find_fixed_point(self, max_iter: int | None = None, tol: float = 1e-12) -> np.ndarray:
        """Damped Newton iteration for F̃(z) = 0 started at the origin."""
        max_iter = max_iter or get_settings().newton_max_iter
        z = np.zeros(self.dim, dtype=complex)

        for iteration in range(max_iter):
            f = self.eval_field(z)
            f_norm = np.linalg.norm(f)
            if f_norm <= tol * (1 + np.linalg.norm(z)):
                logger.debug(f"{self.name}: fixed point {z} after {iteration} Newton iterations")
                return z

            try:
                step = np.linalg.solve(self.eval_jacobian(z), -f)
            except np.linalg.LinAlgError as e:
                raise NoFixedPointFound(f"{self.name}: singular Jacobian during Newton iteration at {z}") from e

            damping = 1.0
            while damping >= 1e-6:
                trial = z + damping * step
                try:
                    if np.linalg.norm(self.eval_field(trial)) < (1 - damping / 2) * f_norm:
                        break
                except SingularState:
                    pass
                damping /= 2
            else:
                raise NoFixedPointFound(f"{self.name}: Newton line search stalled at {z}")
            z = trial

        raise NoFixedPointFound(f"{self.name}: Newton iteration did not converge in {max_iter} iterations")

    def is_attracting(self, point) -> bool:
        return bool(np.all(np.linalg.eigvals(self.eval_jacobian(point)).real < 0))

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from app.config import get_settings
from app.lib.errors import ConfigError, DomainError
from app.ops.models.base import ModelSpec


class FastSign(StrEnum):
    """Sign of the z₂ term in the fast equation."""

    POSITIVE_Z2 = "positive_z2"  # ż₂ = z₁ − z₁z₂ + z₂
    CRITICAL_MANIFOLD_CONSISTENT = "critical_manifold_consistent"  # ż₂ = z₁ − z₁z₂ − z₂


class Eps2Grouping(StrEnum):
    """Reading of the ε² denominator: (2(1+z₁))⁷ or 2(1+z₁)⁷."""

    GROUPED = "grouped"
    UNGROUPED = "ungrouped"


@dataclass(frozen=True)
class MichaelisMentenParams:
    gamma: float
    fast_sign: FastSign = FastSign.CRITICAL_MANIFOLD_CONSISTENT
    eps: float = field(init=False)

    def __post_init__(self):
        if not self.gamma > 1:
            raise ConfigError(f"Michaelis-Menten needs gamma > 1, got {self.gamma}")
        object.__setattr__(self, "fast_sign", FastSign(self.fast_sign))
        object.__setattr__(self, "eps", 1 / self.gamma)


class MichaelisMentenModel(ModelSpec):
    """
    ż₁ = ε(−z₁ + z₁z₂ + z₂/2)
    ż₂ = z₁ − z₁z₂ ∓ z₂

    Not explicitly integrable; the SIM is known as a truncated expansion in ε = 1/γ.
    """

    has_sim_graph = True

    def __init__(self, params: MichaelisMentenParams, eps2_grouping: Eps2Grouping | str | None = None):
        super().__init__("michaelis-menten", 2, {"gamma": params.gamma, "eps": params.eps})
        self.mm_params = params
        self.eps = params.eps
        self._sign = 1.0 if params.fast_sign == FastSign.POSITIVE_Z2 else -1.0
        self.eps2_grouping = Eps2Grouping(eps2_grouping or get_settings().mm_eps2_grouping)

    def _field(self, z):
        z1, z2 = z[0], z[1]
        return np.array(
            [
                self.eps * (-z1 + z1 * z2 + z2 / 2),
                z1 - z1 * z2 + self._sign * z2,
            ]
        )

    def _jacobian(self, z):
        z1, z2 = z[0], z[1]
        e = self.eps
        return np.array(
            [
                [e * (z2 - 1), e * (z1 + 0.5)],
                [1 - z2, self._sign - z1],
            ]
        )

    def sim_graph(self, z1: float, order: int = 0) -> float:
        """
        SIM ordinate z₂ = z₁/(1+z₁) + ε z₁/(2(1+z₁)) + ε² z₁(1 − 5z₁/2)/D,
        truncated after `order`.
        """
        if not z1 > -1:
            raise DomainError(f"SIM graph is defined for z₁ > −1, got {z1}")
        if order not in (0, 1, 2):
            raise DomainError(f"SIM expansion is available up to order 2, got {order}")

        value = z1 / (1 + z1)
        if order >= 1:
            value += self.eps * z1 / (2 * (1 + z1))
        if order >= 2:
            if self.eps2_grouping == Eps2Grouping.GROUPED:
                denominator = (2 * (1 + z1)) ** 7
            else:
                denominator = 2 * (1 + z1) ** 7
            value += self.eps**2 * z1 * (1 - 2.5 * z1) / denominator
        return value

from dataclasses import dataclass

import numpy as np

from app.config import get_settings
from app.lib.errors import BranchAmbiguity, ConfigError, DomainError, SingularState, SolutionPole
from app.ops.entities.spectrum import SpectralLine
from app.ops.entities.time import ComplexTimePoint
from app.ops.models.base import FlowCoefficients, ModelSpec


@dataclass(frozen=True)
class DavisSkodjeParams:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 1:
            raise ConfigError(f"Davis-Skodje needs gamma > 1 (spectral gap), got {self.gamma}")


class DavisSkodjeModel(ModelSpec):
    """
    ż₁ = −z₁
    ż₂ = −γ z₂ + ((γ−1) z₁ + γ z₁²) / (1+z₁)²

    General solution z₁ = c₁e^{−t}, z₂ = c₁e^{−t}/(c₁e^{−t}+1) + c₂e^{−γt};
    the SIM is the graph z₂ = z₁/(1+z₁) (c₂ = 0).
    """

    has_closed_form = True
    has_sim_graph = True

    def __init__(self, params: DavisSkodjeParams, delta_pole: float | None = None, amp_floor: float | None = None):
        super().__init__("davis-skodje", 2, {"gamma": params.gamma})
        settings = get_settings()
        self.gamma = params.gamma
        self.delta_pole = delta_pole if delta_pole is not None else settings.delta_pole
        self.amp_floor = amp_floor if amp_floor is not None else settings.amp_floor
        self.branch_tol = settings.branch_tol

    def singular_locus_test(self, z) -> bool:
        return bool(abs(1 + z[0]) < self.delta_pole)

    def _field(self, z):
        g = self.gamma
        z1, z2 = z[0], z[1]
        return np.array([-z1, -g * z2 + ((g - 1) * z1 + g * z1**2) / (1 + z1) ** 2])

    def _jacobian(self, z):
        g = self.gamma
        z1 = z[0]
        # d/dz₁ of ((γ−1)z₁ + γz₁²)/(1+z₁)² simplifies to ((γ+1)z₁ + γ − 1)/(1+z₁)³
        d21 = ((g + 1) * z1 + g - 1) / (1 + z1) ** 3
        return np.array([[-1.0, 0.0], [d21, -g]])

    def closed_form_solution(self, coeffs: FlowCoefficients, t) -> np.ndarray:
        t = complex(ComplexTimePoint.of(t))
        c1, c2 = coeffs.c
        w = c1 * np.exp(-t)
        if abs(w + 1) < self.delta_pole:
            raise SolutionPole(f"Davis-Skodje solution with c₁={c1} has a pole at t={t}")
        return np.array([w, w / (w + 1) + c2 * np.exp(-self.gamma * t)], dtype=complex)

    def fit_coefficients(self, z0) -> FlowCoefficients:
        z0 = self._as_state(z0)
        if abs(1 + z0[0]) < self.delta_pole:
            raise SingularState(f"Davis-Skodje initial point {z0} lies on z₁ = −1")
        return FlowCoefficients([z0[0], z0[1] - z0[0] / (1 + z0[0])])

    def sim_graph(self, z1: float, order: int = 0) -> float:
        # The graph is exact; `order` only exists for interface symmetry with asymptotic SIMs.
        if not z1 > -1:
            raise DomainError(f"SIM graph is defined for z₁ > −1, got {z1}")
        return z1 / (1 + z1)

    def analytic_spectrum(self, coeffs: FlowCoefficients, amp_floor: float | None = None) -> list[SpectralLine]:
        """
        Dirac comb of z(iτ) under the kernel e^{−iξτ}.

        Component 1 is the single line c₁ at ξ = −1 and component 2 carries c₂ at ξ = −γ.
        The term w/(1+w), w = c₁e^{−iτ}, expands as a geometric series:
        for |c₁| > 1 into lines (−1)^k c₁^{−k} at ξ = +k (k ≥ 0), for |c₁| < 1
        into lines (−1)^{k+1} c₁^k at ξ = −k (k ≥ 1).
        """
        floor = self.amp_floor if amp_floor is None else amp_floor
        c1, c2 = coeffs.c
        if abs(c1.imag) > 0 or c1.real == 0:
            raise DomainError(f"Analytic spectrum needs real c₁ ∉ {{−1, 0}}, got {c1}")
        c1 = c1.real
        if abs(abs(c1) - 1) < self.branch_tol:
            raise BranchAmbiguity(f"|c₁| = {abs(c1)} is too close to 1 to choose a series branch")

        lines = [SpectralLine(xi=-1.0, amplitude=complex(c1), component=0)]
        if abs(c2) >= floor:
            lines.append(SpectralLine(xi=-self.gamma, amplitude=complex(c2), component=1))

        if abs(c1) > 1:
            k, amplitude = 0, 1.0
            while abs(amplitude) >= floor:
                lines.append(SpectralLine(xi=float(k), amplitude=complex(amplitude), component=1))
                k, amplitude = k + 1, -amplitude / c1
        else:
            k, amplitude = 1, c1
            while abs(amplitude) >= floor:
                lines.append(SpectralLine(xi=float(-k), amplitude=complex(amplitude), component=1))
                k, amplitude = k + 1, -amplitude * c1

        return _merge_lines(lines)


def _merge_lines(lines: list[SpectralLine]) -> list[SpectralLine]:
    """Sum amplitudes of lines sharing component and frequency (c₂ at an integer γ meets the comb)."""
    merged: dict[tuple[int, float], complex] = {}
    for line in lines:
        key = (line.component, line.xi)
        merged[key] = merged.get(key, 0j) + line.amplitude
    return [SpectralLine(xi=xi, amplitude=a, component=j) for (j, xi), a in sorted(merged.items())]

from dataclasses import dataclass, field
from enum import StrEnum

from app.ops.entities.spectrum import SpectralLine


class Verdict(StrEnum):
    ON_SIM_CONSISTENT = "on_sim_consistent"
    OFF_SIM = "off_sim"


@dataclass
class DetectionReport:
    """
    Result of the imaginary-time spectral criterion for one initial point.

    off_sim is asserted; on_sim_consistent only means the criterion did not refute SIM membership.
    """

    low_energies: list[float]
    high_energies: list[float]
    high_low_ratio: float
    lambda_supp: float
    verdict: Verdict
    cutoff_used: float
    peaks: list[SpectralLine] = field(default_factory=list)

    @property
    def low_energy(self) -> float:
        return sum(self.low_energies)

    @property
    def high_energy(self) -> float:
        return sum(self.high_energies)

    def dominant_high_peak(self) -> SpectralLine | None:
        high = [p for p in self.peaks if abs(p.xi) >= self.cutoff_used]
        return max(high, key=lambda p: abs(p.amplitude), default=None)


@dataclass(frozen=True)
class GrowthFit:
    """Fit of ‖z(t)‖₁ ≤ C(1+|t|)^N e^{λ|Re t|} along the real axis."""

    lambda_growth: float
    n_poly: float
    c_fit: float
    residual: float


@dataclass(frozen=True)
class PaleyWienerCheck:
    lambda_growth: float
    lambda_supp: float
    consistent: bool
    gap: float
    heuristic: bool = False

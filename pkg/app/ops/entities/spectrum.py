from dataclasses import dataclass
from typing import Literal

import numpy as np

Window = Literal["rectangular", "hann"]
Detrend = Literal["none", "mean", "fixed_point"]

TRANSFORM_CONVENTION = "e^-i xi tau / sqrt(2pi)"


@dataclass(frozen=True)
class SpectralLine:
    """A Dirac-comb line: signed frequency, complex amplitude and the state component it belongs to."""

    xi: float
    amplitude: complex
    component: int = 0


@dataclass
class SpectrumEstimate:
    """
    Signed-frequency spectrum of one state component along imaginary time.

    Amplitudes are calibrated so that a sampled tone a·e^{iλτ} with λ on the
    grid gives a single bin of amplitude a; bin energies are |a|²·Δξ.
    Frequencies run over the FFT grid −N/2 … N/2−1 times Δξ = 2π/T.
    """

    component: int
    frequencies: np.ndarray
    amplitudes: np.ndarray
    window: Window
    T: float
    detrend_offset: complex = 0j

    @property
    def delta_xi(self) -> float:
        return 2 * np.pi / self.T

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    @property
    def energies(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2 * self.delta_xi

    def __len__(self) -> int:
        return len(self.frequencies)

"""
Signed-frequency spectra of imaginary-time trajectories.

Convention: F[f](ξ) = (1/√(2π)) ∫ f(τ) e^{−iξτ} dτ, approximated by the windowed
DFT and calibrated so that a sampled tone a·e^{iλτ} with λ on the frequency
grid yields one bin of amplitude a at ξ = λ.
"""

import logging

import numpy as np
import scipy.fft
from scipy.signal import find_peaks, get_window

from app.config import get_settings
from app.lib.errors import ConfigError, LengthNotPowerOfTwo, NonUniformSampling, ZeroSignal
from app.ops.entities.spectrum import Detrend, SpectralLine, SpectrumEstimate, Window
from app.ops.entities.time import TimePath
from app.ops.entities.trajectory import Trajectory
from app.ops.models.base import ModelSpec
from app.ops.services.flow_service import Tolerance, integrate_imaginary_ray, integrate_path

logger = logging.getLogger(__name__)

UNIFORMITY_RTOL = 1e-12


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def sample_spectral_ray(
    model: ModelSpec,
    z0,
    span: float | None = None,
    n_samples: int | None = None,
    tol: Tolerance | None = None,
    centered: bool = False,
) -> Trajectory:
    """
    n_samples uniform samples of z(iτ) covering one DFT period [0, span).

    The ray is integrated to i·span with n_samples + 1 samples and the endpoint dropped,
    so T = span and Δξ = 2π/span. A centered ray covers [−span/2, span/2) instead,
    integrated outward from z0 in both directions, so a tapering window keeps full
    weight on the samples next to the initial point.
    """
    settings = get_settings()
    span = span if span is not None else settings.spectral_span
    n_samples = n_samples if n_samples is not None else settings.spectral_samples
    if not is_power_of_two(n_samples):
        raise LengthNotPowerOfTwo(f"Spectral sample count must be a power of two, got {n_samples}")
    if not centered:
        return integrate_imaginary_ray(model, z0, span, n_samples + 1, tol).drop_last()
    if n_samples < 2:
        raise ConfigError(f"A centered ray needs at least 2 samples, got {n_samples}")

    half = n_samples // 2
    ahead = integrate_imaginary_ray(model, z0, span / 2, half + 1, tol).drop_last()
    behind = integrate_path(model, z0, TimePath.through(-0.5j * span, samples_per_segment=half), tol)
    # behind runs 0, −Δτ, ..., −span/2; reversed without its first sample it ends at −Δτ
    return Trajectory(
        np.concatenate([behind.times[:0:-1], ahead.times]),
        np.concatenate([behind.states[:0:-1], ahead.states]),
        ahead.step_stats.merge(behind.step_stats),
    )


def _sample_spacing(tau: np.ndarray) -> float:
    if len(tau) < 2:
        raise NonUniformSampling(f"A spectrum needs at least 2 samples, got {len(tau)}")
    span = tau[-1] - tau[0]
    dtau = span / (len(tau) - 1)
    if not dtau > 0:
        raise NonUniformSampling("Samples must advance along the imaginary axis")
    deviation = np.max(np.abs(tau - (tau[0] + dtau * np.arange(len(tau)))))
    if deviation > UNIFORMITY_RTOL * span:
        raise NonUniformSampling(f"Sample times deviate from a uniform grid by {deviation:.3g} (span {span:.6g})")
    return dtau


def _window(window: Window, n: int) -> np.ndarray:
    if window == "rectangular":
        return np.ones(n)
    if window == "hann":
        return get_window("hann", n)
    raise ConfigError(f"Unknown window '{window}'")


def dft_spectrum(
    trajectory: Trajectory,
    component: int,
    window: Window = "rectangular",
    detrend: Detrend = "none",
    model: ModelSpec | None = None,
) -> SpectrumEstimate:
    """
    Windowed DFT of z_j(iτ) over [τ₀, τ₀ + T).

    Raises:
        NonUniformSampling: sample times are not uniform in τ₂ to 1e-12 relative.
        LengthNotPowerOfTwo: the sample count is not a power of two.
        ConfigError: bad component, window or detrend (fixed_point needs the model).
    """
    n = len(trajectory)
    if not is_power_of_two(n):
        raise LengthNotPowerOfTwo(f"Spectral sample count must be a power of two, got {n}")
    tau = trajectory.tau
    dtau = _sample_spacing(tau)
    if not 0 <= component < trajectory.states.shape[1]:
        raise ConfigError(f"Component {component} out of range for a {trajectory.states.shape[1]}-dimensional state")

    signal = trajectory.component(component)
    if detrend == "none":
        offset = 0j
    elif detrend == "mean":
        offset = complex(np.mean(signal))
    elif detrend == "fixed_point":
        if model is None:
            raise ConfigError("detrend=fixed_point needs the model")
        offset = complex(model.find_fixed_point()[component])
    else:
        raise ConfigError(f"Unknown detrend '{detrend}'")

    weights = _window(window, n)
    amplitudes = scipy.fft.fft(weights * (signal - offset)) / weights.sum()
    frequencies = 2 * np.pi * scipy.fft.fftfreq(n, dtau)
    if tau[0] != 0:
        amplitudes = amplitudes * np.exp(-1j * frequencies * tau[0])

    return SpectrumEstimate(
        component=component,
        frequencies=scipy.fft.fftshift(frequencies),
        amplitudes=scipy.fft.fftshift(amplitudes),
        window=window,
        T=n * dtau,
        detrend_offset=offset,
    )


def detect_peaks(spectrum: SpectrumEstimate, rel_threshold: float | None = None) -> list[SpectralLine]:
    """
    Local maxima of |amplitude| above rel_threshold·max|amplitude|, refined by a parabola
    through three bins. Sorted by |amplitude| descending, ties to the smaller |ξ|.
    """
    rel_threshold = rel_threshold if rel_threshold is not None else get_settings().peak_rel_threshold
    if not 0 < rel_threshold < 1:
        raise ConfigError(f"rel_threshold must lie in (0, 1), got {rel_threshold}")

    magnitudes = spectrum.magnitudes
    if len(magnitudes) == 0 or magnitudes.max() == 0:
        return []

    # zero padding lets edge bins qualify as maxima
    padded = np.concatenate([[0.0], magnitudes, [0.0]])
    indices, _ = find_peaks(padded, height=rel_threshold * magnitudes.max())

    lines = []
    for k in indices:
        left, centre, right = padded[k - 1], padded[k], padded[k + 1]
        curvature = left - 2 * centre + right
        offset = float(np.clip(0.5 * (left - right) / curvature, -0.5, 0.5)) if curvature < 0 else 0.0
        height = centre - 0.25 * (left - right) * offset
        amplitude = spectrum.amplitudes[k - 1] * (height / centre)
        xi = spectrum.frequencies[k - 1] + offset * spectrum.delta_xi
        lines.append(SpectralLine(xi=float(xi), amplitude=complex(amplitude), component=spectrum.component))

    return sorted(lines, key=lambda line: (-abs(line.amplitude), abs(line.xi)))


def _in_band(frequencies: np.ndarray, xi_lo: float, xi_hi: float, delta_xi: float) -> np.ndarray:
    # bin frequencies carry rounding, so band edges are widened by a sliver of a bin
    slack = 1e-9 * delta_xi
    radius = np.abs(frequencies)
    return (radius >= xi_lo - slack) & (radius <= xi_hi + slack)


def band_energy(spectrum: SpectrumEstimate, xi_lo: float, xi_hi: float) -> float:
    """Σ |amplitude|²·Δξ over bins with xi_lo ≤ |ξ| ≤ xi_hi."""
    if not 0 <= xi_lo < xi_hi:
        raise ConfigError(f"Band needs 0 <= xi_lo < xi_hi, got [{xi_lo}, {xi_hi}]")
    band = _in_band(spectrum.frequencies, xi_lo, xi_hi, spectrum.delta_xi)
    return float(spectrum.energies[band].sum())


def total_energy(spectrum: SpectrumEstimate) -> float:
    return float(spectrum.energies.sum())


def one_sided(spectrum: SpectrumEstimate) -> tuple[np.ndarray, np.ndarray]:
    """|ξ| grid and the |amplitude|² summed over ±ξ, as drawn in one-sided spectrum plots."""
    radius = np.abs(spectrum.frequencies)
    levels, inverse = np.unique(np.round(radius / spectrum.delta_xi).astype(int), return_inverse=True)
    power = np.zeros(len(levels))
    np.add.at(power, inverse, spectrum.magnitudes**2)
    return levels * spectrum.delta_xi, power


def estimate_support(spectrum: SpectrumEstimate, tail_fraction: float | None = None) -> float:
    """
    Smallest λ on the bin grid such that the energy outside [−λ, λ] is at most
    tail_fraction of the total.

    Raises:
        ZeroSignal: the spectrum carries no energy.
    """
    tail_fraction = tail_fraction if tail_fraction is not None else get_settings().tail_fraction
    if not 0 < tail_fraction < 1:
        raise ConfigError(f"tail_fraction must lie in (0, 1), got {tail_fraction}")

    energies = spectrum.energies
    total = energies.sum()
    if total == 0:
        raise ZeroSignal(f"Component {spectrum.component} has an all-zero spectrum")

    radius = np.round(np.abs(spectrum.frequencies) / spectrum.delta_xi).astype(int)
    order = np.argsort(radius, kind="stable")
    cumulative = np.cumsum(energies[order])
    levels = np.unique(radius)
    last = np.searchsorted(radius[order], levels, side="right") - 1
    outside = total - cumulative[last]
    index = int(np.argmax(outside <= tail_fraction * total))
    return float(levels[index] * spectrum.delta_xi)

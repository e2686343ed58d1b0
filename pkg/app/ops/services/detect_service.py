"""
Classification of initial points by the high-frequency content of their
imaginary-time trajectories, and the growth/support consistency check.

The criterion is one-sided: high-frequency energy above the cutoff asserts
that the point is off the slow invariant manifold, its absence only means the
criterion did not refute membership.
"""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import lsq_linear

from app.config import get_settings
from app.lib.concurrency import map_concurrently
from app.lib.errors import ConfigError, NoFixedPointFound, NoSpectralGap, ZeroSignal
from app.ops.entities.detection import DetectionReport, GrowthFit, PaleyWienerCheck, Verdict
from app.ops.entities.spectrum import Detrend, SpectrumEstimate, Window
from app.ops.entities.time import TimePath
from app.ops.entities.trajectory import Trajectory
from app.ops.models.base import ModelSpec
from app.ops.services.flow_service import Tolerance, integrate_path
from app.ops.services.spectral_service import (
    band_energy,
    detect_peaks,
    dft_spectrum,
    estimate_support,
    is_power_of_two,
    sample_spectral_ray,
    total_energy,
)

logger = logging.getLogger(__name__)

# A spectral gap needs the two leading decay rates at least this far apart.
MIN_GAP_RATIO = 2.0


@dataclass(frozen=True)
class DetectionConfig:
    tau_max: float = field(default_factory=lambda: get_settings().spectral_span)
    n_samples: int = field(default_factory=lambda: get_settings().spectral_samples)
    cutoff: float | Literal["auto"] = "auto"
    tail_fraction: float = field(default_factory=lambda: get_settings().tail_fraction)
    energy_ratio_threshold: float = field(default_factory=lambda: get_settings().energy_ratio_threshold)
    window: Window | Literal["auto"] = "auto"
    detrend: Detrend = "mean"
    centered: bool | Literal["auto"] = "auto"
    peak_rel_threshold: float = field(default_factory=lambda: get_settings().peak_rel_threshold)
    entire_assumed: bool = True
    tol: Tolerance | None = None

    def __post_init__(self):
        if not self.tau_max > 0:
            raise ConfigError(f"tau_max must be positive, got {self.tau_max}")
        if not is_power_of_two(self.n_samples):
            raise ConfigError(f"n_samples must be a power of two, got {self.n_samples}")
        if self.cutoff != "auto" and not self.cutoff > 0:
            raise ConfigError(f"cutoff must be positive, got {self.cutoff}")
        if not 0 < self.tail_fraction < 1:
            raise ConfigError(f"tail_fraction must lie in (0, 1), got {self.tail_fraction}")
        if not self.energy_ratio_threshold > 0:
            raise ConfigError(f"energy_ratio_threshold must be positive, got {self.energy_ratio_threshold}")

    @property
    def delta_xi(self) -> float:
        return 2 * np.pi / self.tau_max

    @property
    def nyquist(self) -> float:
        return np.pi * self.n_samples / self.tau_max

    def resolve_window(self, model: ModelSpec) -> Window:
        if self.window != "auto":
            return self.window
        return "rectangular" if model.has_closed_form else "hann"

    def resolve_centered(self, model: ModelSpec) -> bool:
        """A tapering window fades out the ray ends, so the ray is centered on the initial point."""
        if self.centered != "auto":
            return self.centered
        return self.resolve_window(model) != "rectangular"

    def sample(self, model: ModelSpec, z0) -> Trajectory:
        return sample_spectral_ray(model, z0, self.tau_max, self.n_samples, self.tol, self.resolve_centered(model))


def decay_rates(model: ModelSpec) -> np.ndarray:
    """|Re λ| of the Jacobian at the attracting fixed point, largest first."""
    fixed_point = model.find_fixed_point()
    eigenvalues = np.linalg.eigvals(model.eval_jacobian(fixed_point))
    if not np.all(eigenvalues.real < 0):
        raise NoFixedPointFound(f"{model.name}: fixed point {fixed_point} is not attracting ({eigenvalues})")
    return np.sort(np.abs(eigenvalues.real))[::-1]


def auto_cutoff(model: ModelSpec) -> float:
    """Geometric mean of the two largest decay rates, which sits inside the spectral gap."""
    rates = decay_rates(model)
    if len(rates) < 2 or rates[0] < MIN_GAP_RATIO * rates[1]:
        raise NoSpectralGap(f"{model.name}: decay rates {rates} show no gap of factor {MIN_GAP_RATIO}")
    cutoff = float(np.sqrt(rates[0] * rates[1]))
    logger.debug(f"{model.name}: decay rates {rates}, cutoff {cutoff:.6g}")
    return cutoff


def _resolve_cutoff(model: ModelSpec, config: DetectionConfig) -> float:
    cutoff = auto_cutoff(model) if config.cutoff == "auto" else float(config.cutoff)

    try:
        fast = decay_rates(model)[0]
    except NoFixedPointFound:
        return cutoff
    if config.nyquist < fast:
        raise ConfigError(
            f"{model.name}: Nyquist frequency {config.nyquist:.4g} is below the fast rate {fast:.4g}; "
            f"increase n_samples or shorten tau_max"
        )
    if config.nyquist < 2 * fast:
        logger.warning(f"{model.name}: Nyquist frequency {config.nyquist:.4g} covers less than twice the fast rate")
    return cutoff


def _spectra(model: ModelSpec, trajectory: Trajectory, config: DetectionConfig) -> list[SpectrumEstimate]:
    window = config.resolve_window(model)
    return [dft_spectrum(trajectory, j, window, config.detrend, model) for j in range(model.dim)]


def _support(spectra: list[SpectrumEstimate], tail_fraction: float) -> float:
    supports = []
    for spectrum in spectra:
        try:
            supports.append(estimate_support(spectrum, tail_fraction))
        except ZeroSignal:
            continue
    return max(supports, default=0.0)


def classify(model: ModelSpec, z0, config: DetectionConfig | None = None) -> DetectionReport:
    """
    Integrate the imaginary ray from z0, split every component's spectral energy
    at the cutoff and compare Σhigh/Σlow against the threshold.
    """
    config = config or DetectionConfig()
    cutoff = _resolve_cutoff(model, config)
    trajectory = config.sample(model, z0)
    spectra = _spectra(model, trajectory, config)

    low = [band_energy(s, 0.0, cutoff) for s in spectra]
    high = [max(total_energy(s) - lo, 0.0) for s, lo in zip(spectra, low, strict=True)]
    low_sum, high_sum = sum(low), sum(high)
    if low_sum > 0:
        ratio = high_sum / low_sum
    else:
        ratio = float("inf") if high_sum > 0 else 0.0

    verdict = Verdict.OFF_SIM if ratio > config.energy_ratio_threshold else Verdict.ON_SIM_CONSISTENT
    peaks = sorted(
        (line for s in spectra for line in detect_peaks(s, config.peak_rel_threshold)),
        key=lambda line: (-abs(line.amplitude), abs(line.xi)),
    )
    report = DetectionReport(
        low_energies=low,
        high_energies=high,
        high_low_ratio=ratio,
        lambda_supp=_support(spectra, config.tail_fraction),
        verdict=verdict,
        cutoff_used=cutoff,
        peaks=peaks,
    )
    logger.info(f"{model.name}: z0={np.asarray(z0).tolist()} high/low={ratio:.3e} cutoff={cutoff:.4g} -> {verdict}")
    return report


def classify_batch(
    model: ModelSpec, points, config: DetectionConfig | None = None, threads: int | None = None
) -> list[DetectionReport]:
    config = config or DetectionConfig()
    return map_concurrently(lambda z0: classify(model, z0, config), list(points), threads)


def _directional_fit(s: np.ndarray, norms: np.ndarray, n_poly: float) -> tuple[float, float, float, float]:
    """(λ, N, log C, rms residual) of log‖z‖ ≈ log C + N·log(1+s) + λ·s with N in [0, n_poly]."""
    if not np.any(norms > 0):
        return 0.0, 0.0, np.log(np.finfo(float).tiny), 0.0
    y = np.log(np.maximum(norms, np.finfo(float).tiny))
    A = np.column_stack([np.ones_like(s), np.log1p(s), s])
    fit = lsq_linear(A, y, bounds=([-np.inf, 0.0, -np.inf], [np.inf, max(n_poly, 1e-12), np.inf]))
    log_c, n_fit, rate = fit.x
    residual = float(np.sqrt(np.mean((A @ fit.x - y) ** 2)))
    return float(rate), float(n_fit), float(log_c), residual


def growth_fit(
    model: ModelSpec,
    z0,
    re_max: float,
    n_points: int,
    n_poly: float | None = None,
    tol: Tolerance | None = None,
) -> GrowthFit:
    """
    Fit ‖z(t)‖₁ ≤ C(1+|t|)^N e^{λ|Re t|} along the real axis in both directions.

    Only the outer growth_window fraction of the samples enters the fit, where the
    dominant exponential has taken over; λ is the larger directional rate, clamped at 0.
    """
    settings = get_settings()
    n_poly = n_poly if n_poly is not None else settings.growth_n_poly
    if not re_max > 0:
        raise ConfigError(f"re_max must be positive, got {re_max}")
    if n_points < 4:
        raise ConfigError(f"growth_fit needs at least 4 points, got {n_points}")

    s = re_max * np.arange(n_points) / (n_points - 1)
    outer = s >= (1 - settings.growth_window) * re_max
    if outer.sum() < 3:
        outer[-3:] = True

    fits = []
    for direction in (1.0, -1.0):
        path = TimePath.through(direction * re_max, samples_per_segment=n_points - 1)
        trajectory = integrate_path(model, z0, path, tol)
        norms = np.abs(trajectory.states).sum(axis=1)
        fits.append(_directional_fit(s[outer], norms[outer], n_poly))

    rate, n_fit, log_c, residual = max(fits, key=lambda f: f[0])
    result = GrowthFit(lambda_growth=max(rate, 0.0), n_poly=n_fit, c_fit=float(np.exp(log_c)), residual=residual)
    logger.debug(f"{model.name}: growth fit {result}")
    return result


def paley_wiener_consistency(
    model: ModelSpec,
    z0,
    config: DetectionConfig | None = None,
    re_max: float = 3.0,
    n_points: int = 64,
) -> PaleyWienerCheck:
    """
    Compare the real-time exponential type with the imaginary-time spectral support.

    consistent when |λ_growth − λ_supp| ≤ max(2Δξ, 0.1·λ_growth). Without
    entire_assumed the result is labeled heuristic.
    """
    config = config or DetectionConfig()
    fit = growth_fit(model, z0, re_max, n_points, tol=config.tol)
    trajectory = config.sample(model, z0)
    lambda_supp = _support(_spectra(model, trajectory, config), config.tail_fraction)

    gap = fit.lambda_growth - lambda_supp
    consistent = abs(gap) <= max(2 * config.delta_xi, 0.1 * fit.lambda_growth)
    if not config.entire_assumed:
        logger.warning(f"{model.name}: solution not known to be entire, growth/support comparison is heuristic")
    return PaleyWienerCheck(
        lambda_growth=fit.lambda_growth,
        lambda_supp=lambda_supp,
        consistent=bool(consistent),
        gap=float(gap),
        heuristic=not config.entire_assumed,
    )

"""Oracle- and property-based acceptance suites run by `ctflow validate`."""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from app.lib.errors import ConfigError, SingularityEncountered
from app.ops.entities.detection import Verdict
from app.ops.entities.time import TimePath
from app.ops.entities.trajectory import VariationalState
from app.ops.models.davis_skodje import DavisSkodjeModel, DavisSkodjeParams
from app.ops.models.linear import LinearModel
from app.ops.models.michaelis_menten import MichaelisMentenModel, MichaelisMentenParams
from app.ops.services.detect_service import DetectionConfig, classify_batch, growth_fit
from app.ops.services.flow_service import (
    Tolerance,
    integrate_imaginary_ray,
    integrate_path,
    propagate_variational,
    sample_surface,
)
from app.ops.services.spectral_service import detect_peaks, dft_spectrum, estimate_support, sample_spectral_ray
from app.ops.validate.generator import davis_skodje_batch, davis_skodje_point

TWO_PI = 2 * math.pi


@dataclass
class SuiteOutcome:
    measured: float
    limit: float
    passed: bool
    detail: str = ""


@dataclass
class Suite:
    """An acceptance criterion: a name, what it checks, and the check itself."""

    name: str
    criterion: str
    check: Callable[[Tolerance], SuiteOutcome]


def _davis_skodje(gamma: float) -> DavisSkodjeModel:
    return DavisSkodjeModel(DavisSkodjeParams(gamma))


def closed_form_oracle(tol: Tolerance) -> SuiteOutcome:
    worst = 0.0
    for gamma, z0 in ((3.0, davis_skodje_point(3.0, 0.1)), (10.0, davis_skodje_point(3.0, 0.0))):
        model = _davis_skodje(gamma)
        grid = sample_surface(model, z0, (-1.0, 1.0), (0.0, 4 * math.pi), (17, 129), tol)
        coeffs = model.fit_coefficients(z0)
        times = grid.times[grid.mask]
        exact = np.array([model.closed_form_solution(coeffs, t) for t in times])
        worst = max(worst, float(np.max(np.abs(grid.values[grid.mask] - exact))))
    return SuiteOutcome(worst, 1e-6, worst <= 1e-6, "max |z − closed form| on unmasked 17×129 points")


def linear_comb(tol: Tolerance) -> SuiteOutcome:
    model = LinearModel.diagonal(-1.0, -2.0)
    trajectory = sample_spectral_ray(model, [1.0, 1.0], 32 * TWO_PI, 4096, tol)
    worst = 0.0
    positioned = True
    for component, expected in ((0, -1.0), (1, -2.0)):
        spectrum = dft_spectrum(trajectory, component)
        peaks = detect_peaks(spectrum, 1e-3)
        if not peaks or abs(peaks[0].xi - expected) > spectrum.delta_xi:
            positioned = False
            continue
        worst = max(worst, abs(abs(peaks[0].amplitude) - 1.0))
    return SuiteOutcome(worst, 0.02, positioned and worst <= 0.02, "peaks at ξ = −1, −2; unit amplitudes")


def fast_line(tol: Tolerance) -> SuiteOutcome:
    model = _davis_skodje(10.0)

    present = dft_spectrum(sample_spectral_ray(model, davis_skodje_point(2.0, 0.3), tol=tol), 1)
    fast = [p for p in detect_peaks(present, 1e-6) if -12 <= p.xi <= -8]
    if not fast or abs(fast[0].xi + 10) > present.delta_xi:
        return SuiteOutcome(math.inf, 0.02, False, "no fast line near ξ = −10 with c₂ = 0.3")
    amplitude_error = abs(abs(fast[0].amplitude) - 0.3) / 0.3

    absent = dft_spectrum(sample_spectral_ray(model, davis_skodje_point(2.0, 0.0), tol=tol), 1)
    spurious = [p for p in detect_peaks(absent, 1e-6) if -12 <= p.xi <= -8]
    return SuiteOutcome(
        amplitude_error,
        0.02,
        amplitude_error <= 0.02 and not spurious,
        f"fast line amplitude error with c₂ = 0.3; {len(spurious)} spurious peaks with c₂ = 0",
    )


def michaelis_menten_contrast(tol: Tolerance) -> SuiteOutcome:
    model = MichaelisMentenModel(MichaelisMentenParams(10.0))
    on_sim = np.array([1.0, model.sim_graph(1.0, order=2)])
    off_sim = on_sim + np.array([0.0, 0.3])
    on_report, off_report = classify_batch(model, [on_sim, off_sim], DetectionConfig(tol=tol))
    if on_report.high_low_ratio == 0:
        contrast = math.inf if off_report.high_low_ratio > 0 else 0.0
    else:
        contrast = off_report.high_low_ratio / on_report.high_low_ratio
    verdicts_ok = on_report.verdict == Verdict.ON_SIM_CONSISTENT and off_report.verdict == Verdict.OFF_SIM
    detail = f"off-SIM / on-SIM high/low energy ratio; verdicts {on_report.verdict} / {off_report.verdict}"
    return SuiteOutcome(contrast, 10.0, contrast >= 10.0 and verdicts_ok, detail)


def variational_order(tol: Tolerance) -> SuiteOutcome:
    model = _davis_skodje(3.0)
    z0 = np.array([1.0, 0.5])
    w0 = VariationalState(np.array([1.0, 0.0]))
    taus = np.array([0.04, 0.02, 0.01])
    errors = [
        np.linalg.norm(
            propagate_variational(model, z0, tau, w0, "linearized").w
            - propagate_variational(model, z0, tau, w0, "integrated", tol).w
        )
        for tau in taus
    ]
    slope = float(np.polyfit(np.log(taus), np.log(errors), 1)[0])
    return SuiteOutcome(slope, 2.0, abs(slope - 2.0) <= 0.2, "log-log slope of the frozen-Jacobian error")


def paley_wiener_duality(tol: Tolerance) -> SuiteOutcome:
    model = LinearModel.diagonal(-1.0, -2.0)
    z0 = [1.0, 1.0]
    trajectory = sample_spectral_ray(model, z0, 32 * TWO_PI, 4096, tol)
    spectra = [dft_spectrum(trajectory, j) for j in range(model.dim)]
    lambda_supp = max(estimate_support(s, 1e-6) for s in spectra)
    lambda_growth = growth_fit(model, z0, 3.0, 64, tol=tol).lambda_growth
    support_ok = abs(lambda_supp - 2.0) <= 2 * spectra[0].delta_xi
    relative = abs(lambda_growth - lambda_supp) / lambda_supp
    detail = f"λ_supp = {lambda_supp:.4g}, λ_growth = {lambda_growth:.4g}"
    return SuiteOutcome(relative, 0.1, support_ok and relative <= 0.1, detail)


def periodicity(tol: Tolerance) -> SuiteOutcome:
    model = _davis_skodje(10.0)
    trajectory = integrate_imaginary_ray(model, davis_skodje_point(2.0, 0.3), 4 * math.pi, 257, tol)
    z1 = trajectory.component(0)
    drift = float(np.max(np.abs(z1[128:] - z1[:129])))
    return SuiteOutcome(drift, 1e-7, drift <= 1e-7, "max |z₁(i(τ+2π)) − z₁(iτ)|")


def singularity_handling(tol: Tolerance) -> SuiteOutcome:
    model = _davis_skodje(3.0)
    z0 = np.array([1.0, 0.5])
    try:
        integrate_path(model, z0, TimePath.through(4j), tol)
    except SingularityEncountered as e:
        miss = abs(e.furthest.imag - math.pi)
    else:
        return SuiteOutcome(math.inf, 0.05, False, "ray through the pole at iπ did not stop")

    grid = sample_surface(model, z0, (-0.5, 0.5), (0.0, 4.0), (5, 33), tol)
    masked = int((~grid.mask).sum())
    detail = f"ray stopped at |τ₂ − π| = {miss:.3g}; grid masked {masked} points"
    return SuiteOutcome(miss, 0.05, miss <= 0.05 and masked > 0, detail)


def detection_batch(tol: Tolerance) -> SuiteOutcome:
    model = _davis_skodje(10.0)
    config = DetectionConfig(tau_max=4 * TWO_PI, n_samples=512, tol=tol)
    off_points = davis_skodje_batch(50, seed=1)
    on_points = davis_skodje_batch(50, c2_range=None, seed=2)
    off_hits = sum(r.verdict == Verdict.OFF_SIM for r in classify_batch(model, off_points, config))
    on_hits = sum(r.verdict == Verdict.OFF_SIM for r in classify_batch(model, on_points, config))
    misclassified = (50 - off_hits) + on_hits
    return SuiteOutcome(
        float(misclassified), 0.0, misclassified == 0, f"{off_hits}/50 off-SIM flagged, {on_hits}/50 on-SIM flagged"
    )


SUITES: list[Suite] = [
    Suite("closed_form", "Davis-Skodje surfaces match the closed form", closed_form_oracle),
    Suite("linear_comb", "Linear model comb lines and amplitudes", linear_comb),
    Suite("fast_line", "Fast line present with c₂ ≠ 0, absent with c₂ = 0", fast_line),
    Suite("mm_contrast", "Michaelis-Menten on/off-SIM contrast", michaelis_menten_contrast),
    Suite("variational_order", "Frozen-Jacobian propagator is second order", variational_order),
    Suite("paley_wiener", "Spectral support matches exponential type", paley_wiener_duality),
    Suite("periodicity", "z₁ is 2π-periodic along the imaginary axis", periodicity),
    Suite("singularity", "Rays stop at poles, grids mask", singularity_handling),
    Suite("detection_batch", "Batch classification of Davis-Skodje points", detection_batch),
]


def select(names: list[str] | None) -> list[Suite]:
    if not names:
        return list(SUITES)
    known = {suite.name: suite for suite in SUITES}
    unknown = sorted(set(names) - known.keys())
    if unknown:
        raise ConfigError(f"Unknown suites {unknown}, expected some of {sorted(known)}")
    return [known[name] for name in names]


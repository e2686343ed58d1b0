"""
Integration of holomorphic flows along paths in complex time.

Along a straight segment from t = a in direction u (|u| = 1) the state obeys
dz/ds = u·F̃(z), s being arc length. The complex system is integrated as the
2n-dimensional real system (Re z, Im z) with the Dormand-Prince 5(4) pair of
scipy's RK45 stepper; samples at prescribed arc-length positions come from
its continuous extension.
"""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
from scipy.integrate import RK45

from app.config import get_settings
from app.lib.concurrency import map_concurrently
from app.lib.errors import (
    AnchorOutsideGrid,
    ConfigError,
    SingularityEncountered,
    SingularState,
    ToleranceNotMet,
)
from app.ops.entities.time import TimePath
from app.ops.entities.trajectory import StepStats, SurfaceGrid, Trajectory, VariationalState
from app.ops.models.base import ModelSpec

logger = logging.getLogger(__name__)

# RK45 spends six field evaluations per attempted step (FSAL).
_EVALS_PER_ATTEMPT = 6


@dataclass(frozen=True)
class Tolerance:
    rtol: float
    atol: float
    h_min: float

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.h_min > 0):
            raise ConfigError(f"Tolerances must be positive: rtol={self.rtol}, atol={self.atol}, h_min={self.h_min}")

    @classmethod
    def default(cls, rtol: float | None = None, atol: float | None = None, h_min: float | None = None) -> "Tolerance":
        settings = get_settings()
        return cls(
            rtol=rtol if rtol is not None else settings.rtol,
            atol=atol if atol is not None else settings.atol,
            h_min=h_min if h_min is not None else settings.h_min,
        )


@dataclass
class _SegmentResult:
    states: list[np.ndarray]
    stats: StepStats
    failure: SingularityEncountered | None = None
    end_state: np.ndarray | None = field(default=None, repr=False)


def _real_rhs(model: ModelSpec, u: complex):
    n = model.dim

    def rhs(s, y):
        f = u * model.eval_field(y[:n] + 1j * y[n:])
        return np.concatenate([f.real, f.imag])

    return rhs


def _march(
    model: ModelSpec,
    z_start: np.ndarray,
    start: complex,
    u: complex,
    length: float,
    positions: np.ndarray,
    tol: Tolerance,
) -> _SegmentResult:
    """
    Integrate from `start` along direction u up to arc length `length`, returning
    the states at the ascending arc-length `positions` (all within [0, length]).

    A singularity does not raise here: the result carries the states reached so
    far and the failure, so callers choose between fail-fast and masking.
    """
    settings = get_settings()
    if tol.rtol < 100 * np.finfo(float).eps:
        raise ToleranceNotMet(f"rtol={tol.rtol} is below what double precision can deliver")

    n = model.dim
    stats = StepStats()
    states: list[np.ndarray] = []
    index = 0
    while index < len(positions) and positions[index] <= 0:
        states.append(z_start.copy())
        index += 1
    if length <= 0 or index == len(positions):
        return _SegmentResult(states, stats, end_state=z_start)

    y0 = np.concatenate([z_start.real, z_start.imag])
    solver = RK45(_real_rhs(model, u), 0.0, y0, length, rtol=tol.rtol, atol=tol.atol)

    def failure(reason: str, message: str) -> _SegmentResult:
        furthest = start + u * solver.t
        state = solver.y[:n] + 1j * solver.y[n:]
        logger.debug(f"{model.name}: integration stopped at t={furthest} ({reason}): {message}")
        error = SingularityEncountered(
            f"{model.name}: {message} near t={furthest:.6g}", furthest=furthest, state=state, reason=reason
        )
        return _SegmentResult(states, stats, failure=error)

    while solver.status == "running":
        if stats.accepted >= settings.max_steps:
            raise ToleranceNotMet(f"{model.name}: exceeded {settings.max_steps} steps before reaching s={length}")

        nfev_before = solver.nfev
        try:
            message = solver.step()
        except SingularState as e:
            return failure("locus", str(e))
        if solver.status == "failed":
            return failure("step_underflow", message or "step size underflow")

        attempts = max(1, (solver.nfev - nfev_before) // _EVALS_PER_ATTEMPT)
        stats.accepted += 1
        stats.rejected += attempts - 1
        stats.min_step = min(stats.min_step, solver.step_size)

        y = solver.y
        if not np.all(np.isfinite(y)):
            return failure("non_finite", "state became non-finite")
        if np.linalg.norm(y) > settings.blowup_norm:
            return failure("blowup", f"state norm exceeded {settings.blowup_norm:g}")

        if index < len(positions) and positions[index] <= solver.t:
            dense = solver.dense_output()
            while index < len(positions) and positions[index] <= solver.t:
                ys = y if positions[index] == solver.t else dense(positions[index])
                states.append(ys[:n] + 1j * ys[n:])
                index += 1

        if solver.status == "running" and solver.h_abs < tol.h_min:
            return failure("step_underflow", f"step size {solver.h_abs:.3g} fell below h_min={tol.h_min:g}")

    end_state = solver.y[:n] + 1j * solver.y[n:]
    while index < len(positions):
        states.append(end_state.copy())
        index += 1
    return _SegmentResult(states, stats, end_state=end_state)


def integrate_path(model: ModelSpec, z0, path: TimePath, tol: Tolerance | None = None) -> Trajectory:
    """
    Continue the solution through z0 along a piecewise-linear path in complex time.

    Raises:
        SingularState: z0 lies on the model's singular locus.
        SingularityEncountered: the path runs into a singularity (reports the furthest valid time).
        ToleranceNotMet: the step budget was exhausted.
    """
    tol = tol or Tolerance.default()
    z = model._checked(z0)
    times = [0j]
    states = [z.copy()]
    stats = StepStats()

    m = path.samples_per_segment
    for a, b in path.segments:
        length = abs(b - a)
        u = (b - a) / length
        positions = length * np.arange(1, m + 1) / m
        result = _march(model, z, a, u, length, positions, tol)
        stats = stats.merge(result.stats)
        if result.failure:
            raise result.failure
        times.extend(a + u * positions)
        states.extend(result.states)
        z = result.states[-1]

    logger.debug(
        f"{model.name}: path of length {path.length:.6g} done, {stats.accepted} steps accepted, "
        f"{stats.rejected} rejected, min step {stats.min_step:.3g}"
    )
    return Trajectory(np.asarray(times, dtype=complex), np.asarray(states, dtype=complex), stats)


def integrate_imaginary_ray(
    model: ModelSpec, z0, tau_max: float, n_samples: int, tol: Tolerance | None = None
) -> Trajectory:
    """Samples of z(iτ) at τ = k·τ_max/(n_samples−1), k = 0..n_samples−1."""
    if not tau_max > 0:
        raise ConfigError(f"tau_max must be positive, got {tau_max}")
    if n_samples < 2:
        raise ConfigError(f"An imaginary ray needs at least 2 samples, got {n_samples}")
    path = TimePath.through(1j * tau_max, samples_per_segment=n_samples - 1)
    return integrate_path(model, z0, path, tol)


def sample_surface(
    model: ModelSpec,
    z0,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    shape: tuple[int, int],
    tol: Tolerance | None = None,
    threads: int | None = None,
) -> SurfaceGrid:
    """
    Sample the complex-time solution on a rectangle.

    Each real-time gridline τ₁ is reached along the real axis first, then the
    imaginary direction is swept from τ₂ = 0 upward and downward. A ray that
    hits a singularity masks its remaining points instead of failing the grid.
    """
    tol = tol or Tolerance.default()
    (a, b), (c, d) = re_range, im_range
    n_re, n_im = shape
    if not all(np.isfinite([a, b, c, d])) or a > b or c > d:
        raise ConfigError(f"Invalid surface ranges re={re_range}, im={im_range}")
    if n_re < 1 or n_im < 1:
        raise ConfigError(f"Surface shape must be positive, got {shape}")
    if not (a <= 0 <= b and c <= 0 <= d):
        raise AnchorOutsideGrid(f"The grid re={re_range} × im={im_range} must contain t = 0")

    z0 = model._checked(z0)
    im_values = np.linspace(c, d, n_im)
    up = np.flatnonzero(im_values >= 0)
    down = np.flatnonzero(im_values < 0)[::-1]

    def row(tau1: float) -> tuple[np.ndarray, np.ndarray]:
        values = np.full((n_im, model.dim), np.nan + 1j * np.nan)
        mask = np.zeros(n_im, dtype=bool)

        anchor = z0
        if tau1 != 0:
            try:
                anchor = integrate_path(model, z0, TimePath.through(tau1), tol).final
            except SingularityEncountered as e:
                logger.warning(f"{model.name}: real-axis anchor τ₁={tau1:.6g} unreachable, row masked: {e}")
                return values, mask

        for indices, direction, length in ((up, 1j, d), (down, -1j, -c)):
            if indices.size == 0:
                continue
            positions = np.abs(im_values[indices])
            result = _march(model, anchor, complex(tau1), direction, length, positions, tol)
            reached = indices[: len(result.states)]
            if len(reached):
                values[reached] = np.asarray(result.states)
                mask[reached] = True
            if result.failure:
                logger.warning(
                    f"{model.name}: ray τ₁={tau1:.6g} masked beyond t={result.failure.furthest:.6g} "
                    f"({result.failure.reason})"
                )
        return values, mask

    rows = map_concurrently(row, list(np.linspace(a, b, n_re)), threads)
    values = np.stack([r[0] for r in rows])
    mask = np.stack([r[1] for r in rows])
    return SurfaceGrid(re_range=(a, b), im_range=(c, d), values=values, mask=mask)


class TangentModel(ModelSpec):
    """The coupled system (ż, ẇ) = (F̃(z), J(z)·w) of a model and its first variational equation."""

    def __init__(self, model: ModelSpec):
        super().__init__(f"{model.name}+tangent", 2 * model.dim, model.params)
        self.base = model

    def singular_locus_test(self, y) -> bool:
        return self.base.singular_locus_test(y[: self.base.dim])

    def _field(self, y):
        n = self.base.dim
        z, w = y[:n], y[n:]
        return np.concatenate([self.base.eval_field(z), self.base.eval_jacobian(z) @ w])

    def _jacobian(self, y):
        n = self.base.dim
        z, w = y[:n], y[n:]
        J = self.base.eval_jacobian(z)
        # ∂(J(z)w)/∂z by central differences; only needed for completeness of the interface.
        dJw = np.empty((n, n), dtype=complex)
        for k in range(n):
            h = 1e-6 * max(1.0, abs(z[k]))
            e = np.zeros(n, dtype=complex)
            e[k] = h
            dJw[:, k] = (self.base.eval_jacobian(z + e) @ w - self.base.eval_jacobian(z - e) @ w) / (2 * h)
        return np.block([[J, np.zeros((n, n))], [dJw, J]])


def propagate_variational(
    model: ModelSpec,
    z0,
    tau: float,
    w0: VariationalState,
    method: Literal["linearized", "integrated"] = "linearized",
    tol: Tolerance | None = None,
) -> VariationalState:
    """
    Propagate a tangent vector along imaginary time, d/dτ w = i·J(z(iτ))·w.

    linearized freezes the Jacobian at z0: w(iτ) ≈ expm(iτ·J(z0))·w0.
    integrated co-integrates (z, w) along 0 → iτ.
    """
    w = np.asarray(w0.w, dtype=complex)
    if tau == 0:
        return VariationalState(w.copy())

    if method == "linearized":
        J = model.eval_jacobian(z0)
        return VariationalState(scipy.linalg.expm(1j * tau * J) @ w)
    if method == "integrated":
        z = model._checked(z0)
        trajectory = integrate_path(TangentModel(model), np.concatenate([z, w]), TimePath.through(1j * tau), tol)
        return VariationalState(trajectory.final[model.dim :])
    raise ConfigError(f"Unknown variational method '{method}'")

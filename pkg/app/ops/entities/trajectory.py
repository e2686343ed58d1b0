from dataclasses import dataclass, field

import numpy as np


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    min_step: float = float("inf")

    def merge(self, other: "StepStats") -> "StepStats":
        return StepStats(
            accepted=self.accepted + other.accepted,
            rejected=self.rejected + other.rejected,
            min_step=min(self.min_step, other.min_step),
        )


@dataclass
class Trajectory:
    """
    Solution samples along a path in complex time.

    `times` is a complex array of shape (m,), `states` a complex array of shape (m, n);
    samples are ordered by arc length along the path and states[0] is the initial condition.
    """

    times: np.ndarray
    states: np.ndarray
    step_stats: StepStats = field(default_factory=StepStats)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError(f"times and states differ in length: {len(self.times)} != {len(self.states)}")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def tau(self) -> np.ndarray:
        """Imaginary-time coordinates of the samples."""
        return self.times.imag

    def component(self, j: int) -> np.ndarray:
        return self.states[:, j]

    def drop_last(self) -> "Trajectory":
        return Trajectory(self.times[:-1], self.states[:-1], self.step_stats)


@dataclass
class SurfaceGrid:
    """
    Trajectory samples over a rectangle in complex time (a sampled Riemann surface).

    values[i, k] is the state at t = re_values[i] + i·im_values[k]; mask[i, k] is False
    where the ray through that point stopped at a singularity (values are NaN there).
    """

    re_range: tuple[float, float]
    im_range: tuple[float, float]
    values: np.ndarray
    mask: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[0], self.values.shape[1]

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    @property
    def re_values(self) -> np.ndarray:
        return np.linspace(self.re_range[0], self.re_range[1], self.shape[0])

    @property
    def im_values(self) -> np.ndarray:
        return np.linspace(self.im_range[0], self.im_range[1], self.shape[1])

    @property
    def times(self) -> np.ndarray:
        return self.re_values[:, None] + 1j * self.im_values[None, :]

    def real_time_trajectory(self) -> tuple[np.ndarray, np.ndarray] | None:
        """The τ₂ = 0 column (the real-time trajectory) when the grid contains it."""
        hits = np.flatnonzero(self.im_values == 0.0)
        if hits.size == 0:
            return None
        k = hits[0]
        return self.re_values, self.values[:, k, :]


@dataclass(frozen=True)
class VariationalState:
    w: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.w)):
            raise ValueError("Variational state must be finite")

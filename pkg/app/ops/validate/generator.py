"""Initial-point generators for the validation suites."""

import numpy as np


def davis_skodje_point(c1: float, c2: float) -> np.ndarray:
    """The real initial point whose closed-form constants are (c1, c2)."""
    return np.array([c1, c1 / (1 + c1) + c2])


def davis_skodje_batch(
    count: int,
    c1_range: tuple[float, float] = (2.5, 3.0),
    c2_range: tuple[float, float] | None = (0.15, 0.5),
    seed: int = 0,
) -> list[np.ndarray]:
    """
    Random Davis-Skodje points with c₁ uniform in c1_range and |c₂| uniform in c2_range
    with random sign; c2_range=None places every point on the SIM (c₂ = 0).
    """
    rng = np.random.default_rng(seed)
    c1 = rng.uniform(*c1_range, size=count)
    if c2_range is None:
        c2 = np.zeros(count)
    else:
        c2 = rng.uniform(*c2_range, size=count) * rng.choice([-1.0, 1.0], size=count)
    return [davis_skodje_point(a, b) for a, b in zip(c1, c2, strict=True)]

import math
from dataclasses import dataclass, field

from app.lib.errors import ConfigError


@dataclass(frozen=True)
class ComplexTimePoint:
    """A point t = re + i·im in the complex time plane."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ConfigError(f"Complex time must be finite, got {self.re} + {self.im}i")

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, t: "complex | float | ComplexTimePoint") -> "ComplexTimePoint":
        if isinstance(t, ComplexTimePoint):
            return t
        t = complex(t)
        return cls(t.real, t.imag)


@dataclass(frozen=True)
class TimePath:
    """
    Piecewise-linear path in complex time starting at t = 0.

    Each segment contributes `samples_per_segment` samples at equally spaced
    arc-length positions, the segment end included and its start excluded
    (the start is the previous segment's end).
    """

    vertices: tuple[ComplexTimePoint, ...] = field(default_factory=lambda: (ComplexTimePoint(0.0),))
    samples_per_segment: int = 1

    def __post_init__(self):
        if not self.vertices:
            raise ConfigError("A time path needs at least one vertex")
        if complex(self.vertices[0]) != 0:
            raise ConfigError(f"A time path must start at the origin, got {complex(self.vertices[0])}")
        if self.samples_per_segment < 1:
            raise ConfigError("samples_per_segment must be positive")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if complex(a) == complex(b):
                raise ConfigError(f"Consecutive path vertices must differ, got {complex(a)} twice")

    @classmethod
    def through(cls, *points: "complex | float | ComplexTimePoint", samples_per_segment: int = 1) -> "TimePath":
        """Path 0 → points[0] → points[1] → ...; a leading 0 is not repeated."""
        vertices = [ComplexTimePoint(0.0)]
        for p in points:
            point = ComplexTimePoint.of(p)
            if complex(point) != complex(vertices[-1]):
                vertices.append(point)
        return cls(tuple(vertices), samples_per_segment)

    @property
    def segments(self) -> list[tuple[complex, complex]]:
        return [(complex(a), complex(b)) for a, b in zip(self.vertices, self.vertices[1:])]

    @property
    def length(self) -> float:
        return sum(abs(b - a) for a, b in self.segments)

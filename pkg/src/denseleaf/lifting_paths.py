r"""Piecewise paths in the base C^M used for loop lifting.

Three concrete segment kinds cover everything the package needs: straight
lines, circular arcs in a single coordinate, and torus loops
t |-> (y_1 e^{2 pi i m_1 t}, ..., y_M e^{2 pi i m_M t}) driven by an
integer exponent vector.  All three know their exact arc length and their
exact sup-norm over the parameter interval, which keeps the lifting guard
honest (no sampling).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = [
    "Segment",
    "LineSegment",
    "CoordinateArc",
    "TorusLoop",
    "PiecewisePath",
]

_CONT_TOL = 1e-9


class Segment:
    """Parametrized curve on [0, 1]; subclasses implement the geometry."""

    def point(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def velocity(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def length(self) -> float:
        raise NotImplementedError

    def sup_abs(self) -> float:
        """max over t of max_i |x_i(t)|, computed exactly."""
        raise NotImplementedError

    def reversed(self) -> "Segment":
        return _Reversed(self)


class _Reversed(Segment):
    def __init__(self, inner: Segment):
        self.inner = inner

    def point(self, t):
        return self.inner.point(1.0 - t)

    def velocity(self, t):
        return -self.inner.velocity(1.0 - t)

    def length(self):
        return self.inner.length()

    def sup_abs(self):
        return self.inner.sup_abs()

    def reversed(self):
        return self.inner


class LineSegment(Segment):
    def __init__(self, start: Sequence[complex], end: Sequence[complex]):
        self.start = np.asarray(start, dtype=complex)
        self.end = np.asarray(end, dtype=complex)
        if self.start.shape != self.end.shape or self.start.ndim != 1:
            raise ValueError("endpoints must be vectors of equal dimension")

    def point(self, t):
        return self.start + t * (self.end - self.start)

    def velocity(self, t):
        return self.end - self.start

    def length(self):
        return float(np.linalg.norm(self.end - self.start))

    def sup_abs(self):
        # |a + t(b-a)| is convex in t, so the max sits at an endpoint
        return float(max(np.abs(self.start).max(), np.abs(self.end).max()))


class CoordinateArc(Segment):
    """One coordinate runs along center + radius e^{i theta}; the others sit
    still at the base point."""

    def __init__(self, base: Sequence[complex], coord: int, center: complex,
                 radius: float, theta0: float, theta1: float):
        self.base = np.asarray(base, dtype=complex)
        if not 0 <= coord < self.base.shape[0]:
            raise ValueError("coordinate index out of range")
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.coord = coord
        self.center = complex(center)
        self.radius = float(radius)
        self.theta0 = float(theta0)
        self.theta1 = float(theta1)

    def point(self, t):
        x = self.base.copy()
        th = self.theta0 + t * (self.theta1 - self.theta0)
        x[self.coord] = self.center + self.radius * np.exp(1j * th)
        return x

    def velocity(self, t):
        v = np.zeros_like(self.base)
        th = self.theta0 + t * (self.theta1 - self.theta0)
        v[self.coord] = self.radius * 1j * (self.theta1 - self.theta0) * np.exp(1j * th)
        return v

    def length(self):
        return self.radius * abs(self.theta1 - self.theta0)

    def sup_abs(self):
        rest = np.abs(np.delete(self.base, self.coord))
        moving = abs(self.center) + self.radius
        return float(max(moving, rest.max() if rest.size else 0.0))


class TorusLoop(Segment):
    """t |-> (y_1 e^{2 pi i m_1 t}, ...): the closed loop driven by an
    integer exponent vector.  Coordinates with y_i = 0 stay at 0."""

    def __init__(self, y: Sequence[complex], powers: Sequence[int], turns: int = 1):
        self.y = np.asarray(y, dtype=complex)
        self.powers = np.asarray(powers, dtype=int)
        if self.y.shape != self.powers.shape:
            raise ValueError("need one integer power per coordinate")
        self.turns = int(turns)

    def point(self, t):
        return self.y * np.exp(2j * np.pi * self.powers * self.turns * t)

    def velocity(self, t):
        rate = 2j * np.pi * self.powers * self.turns
        return self.y * rate * np.exp(2j * np.pi * self.powers * self.turns * t)

    def length(self):
        # constant speed: |y_i m_i| each stay on circles
        return 2 * math.pi * abs(self.turns) * float(np.linalg.norm(self.y * self.powers))

    def sup_abs(self):
        return float(np.abs(self.y).max()) if self.y.size else 0.0

    def reversed(self):
        return TorusLoop(self.y, self.powers, -self.turns)


class PiecewisePath:
    """A continuous chain of segments."""

    def __init__(self, segments: Sequence[Segment]):
        if not segments:
            raise ValueError("a path needs at least one segment")
        self.segments = list(segments)
        for a, b in zip(self.segments, self.segments[1:]):
            if not np.allclose(a.point(1.0), b.point(0.0), atol=_CONT_TOL, rtol=0):
                raise ValueError("segments do not chain continuously")

    @classmethod
    def single(cls, seg: Segment) -> "PiecewisePath":
        return cls([seg])

    def start(self) -> np.ndarray:
        return self.segments[0].point(0.0)

    def end(self) -> np.ndarray:
        return self.segments[-1].point(1.0)

    def is_closed(self) -> bool:
        return bool(np.allclose(self.start(), self.end(), atol=_CONT_TOL, rtol=0))

    def length(self) -> float:
        return sum(s.length() for s in self.segments)

    def sup_abs(self) -> float:
        return max(s.sup_abs() for s in self.segments)

    def reversed(self) -> "PiecewisePath":
        return PiecewisePath([s.reversed() for s in reversed(self.segments)])

    def concat(self, other: "PiecewisePath") -> "PiecewisePath":
        return PiecewisePath(self.segments + other.segments)

    def __len__(self):
        return len(self.segments)

"""Vector primitives, tolerance policy and interpolation kernels.

Everything the kinetic engine measures (edge lengths, vertex/edge gaps)
varies linearly inside one time increment, so a single scalar
zero-crossing kernel serves every event detector.  Tolerances are
absolute values in a normalized coordinate frame in which the input
polygon's bounding box has a maximum extent of one; ``NormFrame``
carries the transform between world and normalized coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

__all__ = [
    "Vec2",
    "Vec3",
    "Tolerances",
    "NormFrame",
    "zero_crossing_xi",
    "xi_to_dt",
    "project_length",
    "signed_area",
    "polygon_contains",
    "segments_properly_intersect",
]


class Vec2(NamedTuple):
    """Immutable planar vector with the handful of operations we need."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def scaled(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)

    def perp_right(self) -> "Vec2":
        """Rotate by -90 degrees; the outward normal of CCW travel."""
        return Vec2(self.y, -self.x)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":  # type: ignore[override]
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def xy(self) -> Vec2:
        return Vec2(self.x, self.y)


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances, valid in the normalized frame.

    eps_geom:         coincidence threshold for lengths and gaps.
    eps_param:        threshold on the interpolation parameter xi.
    eps_time_cluster: fraction of the increment within which events are
                      treated as simultaneous.
    """

    eps_geom: float = 1e-9
    eps_param: float = 1e-9
    eps_time_cluster: float = 1e-9

    def __post_init__(self) -> None:
        if self.eps_geom <= 0.0 or self.eps_param <= 0.0 or self.eps_time_cluster <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.eps_param > 1.0:
            raise ValueError("eps_param must not exceed 1")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class NormFrame:
    """Similarity transform between world and normalized coordinates.

    Normalized positions are ``(p - offset) * scale`` with ``scale``
    chosen so the initial bounding box has maximum extent one.  Heights
    scale the same way, which keeps roof slopes unchanged.
    """

    offset: Vec2
    scale: float

    # extents outside this band would push the similarity factor, or its
    # products with desk-scale heights, out of double range
    MIN_EXTENT = 1e-140
    MAX_EXTENT = 1e140

    @staticmethod
    def from_points(points: Iterable[Vec2]) -> "NormFrame":
        pts = list(points)
        if not pts:
            raise ValueError("cannot build a frame from no points")
        xmin = min(p.x for p in pts)
        xmax = max(p.x for p in pts)
        ymin = min(p.y for p in pts)
        ymax = max(p.y for p in pts)
        extent = max(xmax - xmin, ymax - ymin)
        if extent <= 0.0:
            raise ValueError("input points are degenerate (zero extent)")
        if not (NormFrame.MIN_EXTENT <= extent <= NormFrame.MAX_EXTENT):
            raise ValueError(f"input extent {extent!r} is outside the representable range")
        return NormFrame(offset=Vec2(xmin, ymin), scale=1.0 / extent)

    def to_norm(self, p: Vec2) -> Vec2:
        return Vec2((p.x - self.offset.x) * self.scale, (p.y - self.offset.y) * self.scale)

    def to_world(self, p: Vec2) -> Vec2:
        return Vec2(p.x / self.scale + self.offset.x, p.y / self.scale + self.offset.y)

    def z_to_norm(self, z: float) -> float:
        return z * self.scale

    def z_to_world(self, z: float) -> float:
        return z / self.scale


def zero_crossing_xi(f_n: float, f_np1: float, eps_geom: float = 1e-9) -> float | None:
    """Interpolation parameter at which a linearly varying scalar hits zero.

    The scalar is known at the increment start (``f_n``, xi = -1) and at
    the predicted end (``f_np1``, xi = +1).  Returns xi in [-1, 1], or
    None when the increment does not bracket a zero.  A value that ends
    within ``eps_geom`` of zero counts as bracketing; a constant value
    inside the tolerance band reports an immediate event at xi = -1.
    """
    crosses = (f_n > 0.0) != (f_np1 > 0.0) or abs(f_np1) <= eps_geom
    if not crosses:
        return None
    f_m = 0.5 * (f_np1 + f_n)
    f_d = 0.5 * (f_np1 - f_n)
    if f_d == 0.0:
        if abs(f_m) <= eps_geom:
            return -1.0
        return None
    xi = -f_m / f_d
    if xi < -1.0:
        return -1.0
    if xi > 1.0:
        return 1.0
    return xi


def xi_to_dt(xi: float, dt_n: float) -> float:
    """Map xi in [-1, 1] onto the elapsed fraction of an increment."""
    return 0.5 * (1.0 + xi) * dt_n


def project_length(d: Vec2, u: Vec2) -> float:
    """Signed length of ``d`` along the unit direction ``u``."""
    return d.dot(u)


# ---------------------------------------------------------------------------
# small planar helpers used by ingest validation
# ---------------------------------------------------------------------------


def signed_area(ring: list[Vec2]) -> float:
    """Shoelace area; positive for counterclockwise rings."""
    acc = 0.0
    n = len(ring)
    for i in range(n):
        p = ring[i]
        q = ring[(i + 1) % n]
        acc += p.x * q.y - q.x * p.y
    return 0.5 * acc

def polygon_contains(ring: list[Vec2], p: Vec2) -> bool:
    """Even-odd ray-casting containment test (boundary not handled specially)."""
    inside = False
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x)
            if p.x < x_cross:
                inside = not inside
    return inside


def segments_properly_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2, eps: float = 0.0) -> bool:
    """True when the open segments ab and cd cross at an interior point."""
    d1 = (b - a).cross(c - a)
    d2 = (b - a).cross(d - a)
    d3 = (d - c).cross(a - c)
    d4 = (d - c).cross(b - c)
    return (
        ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps))
        and ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps))
    )

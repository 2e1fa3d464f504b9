"""Vertex velocities from the roof planes over the wavefront edges.

Every edge carries a roof plane whose steepness is the inclination
``alpha`` measured between the plane and the ground on the outer side
of the edge: alpha < pi/2 drives the edge inward, alpha = pi/2 keeps it
stationary (a vertical wall) and alpha > pi/2 drives it outward.  A
vertex must stay on the planes of both incident edges while the whole
front rises at ``v_z``, which pins its planar velocity as the solution
of a 2x2 linear system.  A singular system marks the vertex as
colinear: its incident planes no longer intersect in a single line and
the vertex has to be removed by wavefront surgery.
"""

from __future__ import annotations

import math

from .geom import Tolerances, Vec2, Vec3

__all__ = [
    "ALPHA_CLAMP",
    "clamp_alpha",
    "alpha_from_weight",
    "weight_from_alpha",
    "roof_tangent",
    "roof_normal",
    "edge_roof_normal",
    "solve_vertex_velocity",
    "is_colinear",
    "velocity_from_weights",
]

# Inclinations are kept away from 0 and pi so every roof plane, however
# shallow, still meets the ground in a well-conditioned line.
ALPHA_CLAMP = 1e-6


def clamp_alpha(alpha: float) -> float:
    if not math.isfinite(alpha) or alpha <= 0.0 or alpha >= math.pi:
        raise ValueError(f"inclination must lie in (0, pi), got {alpha!r}")
    return min(max(alpha, ALPHA_CLAMP), math.pi - ALPHA_CLAMP)


def alpha_from_weight(weight: float) -> float:
    """Inclination whose ground-plane edge speed per unit rise is ``weight``.

    Positive weights move the edge inward, zero keeps it stationary and
    negative weights move it outward.
    """
    return clamp_alpha(math.atan2(1.0, weight))


def weight_from_alpha(alpha: float) -> float:
    """Planar edge speed per unit rise; the cotangent of the inclination.

    Evaluated in the half-angle form ``(1 + cos 2a) / sin 2a`` rather
    than ``cos a / sin a``: the single division keeps the two anchor
    conversions exact in floating point -- ``atan2(1, 1)`` maps back to
    exactly 1 and ``pi/2`` to exactly 0 -- so unit-weight fronts shrink
    with exactly symmetric detector scalars and stationary edges do not
    creep.
    """
    return (1.0 + math.cos(2.0 * alpha)) / math.sin(2.0 * alpha)


def roof_tangent(alpha: float, n_out: Vec2) -> Vec3:
    """Unit vector up the roof plane, perpendicular to the edge.

    Built by tilting the upward axis by (pi - alpha) toward the outward
    edge normal, so shallow planes lean far over the outside.  Written
    via the supplement identities so that mirrored inclinations produce
    bit-identical components; symmetric inputs then cancel exactly in
    the velocity solve.
    """
    c = -math.cos(alpha)
    s = math.sin(alpha)
    return Vec3(c * n_out.x, c * n_out.y, s)


def roof_normal(u: Vec2, t: Vec3) -> Vec3:
    """Unit normal of the roof plane spanned by edge direction and tangent."""
    return Vec3(u.x, u.y, 0.0).cross(t)


def edge_roof_normal(u: Vec2, n_out: Vec2, alpha: float) -> Vec3:
    return roof_normal(u, roof_tangent(alpha, n_out))


def _det_is_singular(s_prev: Vec3, s_next: Vec3, tol: Tolerances) -> tuple[float, bool]:
    det = s_prev.x * s_next.y - s_prev.y * s_next.x
    row = max(math.hypot(s_prev.x, s_prev.y), math.hypot(s_next.x, s_next.y))
    return det, abs(det) <= tol.eps_geom * row


def solve_vertex_velocity(
    s_prev: Vec3, s_next: Vec3, v_z: float, tol: Tolerances
) -> Vec2 | None:
    """Planar velocity keeping a vertex on both incident roof planes.

    Solves ``s.xy . v = -s.z * v_z`` for both plane normals.  Two
    degenerate cases when the projected normals are linearly dependent:
    pointing the same way means the edges are colinear and the vertex
    must be removed, so None is returned; pointing opposite ways means
    the vertex caps a corridor between two approaching walls (the tip
    of a ridge in the making), and it rides the corridor midline.
    """
    det, singular = _det_is_singular(s_prev, s_next, tol)
    if singular:
        ax, ay = s_prev.x, s_prev.y
        bx, by = s_next.x, s_next.y
        if ax * bx + ay * by >= 0.0:
            return None
        na = math.hypot(ax, ay)
        nb = math.hypot(bx, by)
        if na <= tol.eps_geom or nb <= tol.eps_geom:
            return None
        w_prev = s_prev.z / na
        w_next = s_next.z / nb
        drift = 0.5 * (w_next - w_prev) * v_z
        return Vec2(drift * ax / na, drift * ay / na)
    b1 = -s_prev.z * v_z
    b2 = -s_next.z * v_z
    vx = (b1 * s_next.y - b2 * s_prev.y) / det
    vy = (s_prev.x * b2 - s_next.x * b1) / det
    return Vec2(vx, vy)


def is_colinear(s_prev: Vec3, s_next: Vec3, tol: Tolerances) -> bool:
    """True when the edges are colinear (parallel same-facing normals)."""
    _, singular = _det_is_singular(s_prev, s_next, tol)
    if not singular:
        return False
    return s_prev.x * s_next.x + s_prev.y * s_next.y >= 0.0


def velocity_from_weights(
    n_prev: Vec2, w_prev: float, n_next: Vec2, w_next: float, tol: Tolerances
) -> Vec2 | None:
    """Velocity from per-edge ground speeds; the classic offset corner rule.

    Solves ``(-n_out) . v = w`` for both edges.  Agrees with
    :func:`solve_vertex_velocity` at ``v_z = 1`` when each weight is the
    cotangent of the corresponding inclination, and resolves the two
    singular cases the same way: colinear edges (normals pointing the
    same way) return None, anti-parallel edges keep the vertex on the
    corridor midline.
    """
    det = n_prev.x * n_next.y - n_prev.y * n_next.x
    row = max(n_prev.norm(), n_next.norm())
    if abs(det) <= tol.eps_geom * row:
        if n_prev.x * n_next.x + n_prev.y * n_next.y >= 0.0:
            return None
        na = n_prev.norm()
        if na <= tol.eps_geom:
            return None
        return n_prev.scaled(0.5 * (w_next - w_prev) / na)
    vx = (-w_prev * n_next.y + w_next * n_prev.y) / det
    vy = (-n_prev.x * w_next + n_next.x * w_prev) / det
    return Vec2(vx, vy)

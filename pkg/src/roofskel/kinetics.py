"""Predictor-corrector time stepping for the deforming polygon.

One increment works on frozen velocities: predict every vertex at the
requested time step, measure each detector scalar (projected edge
length for collapses, signed vertex/edge gap for penetrations) at both
ends, and interpolate the earliest zero crossing.  All positions are
then corrected back to that event time, the simultaneous event batch is
applied through wavefront surgery, velocities are re-solved, and the
cascade of follow-up degeneracies (colinear vertices, freshly
zero-length edges, terminal-sized loops) is settled before control
returns to the caller, which may re-attempt the remainder of its
increment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Tolerances, Vec2, xi_to_dt, zero_crossing_xi
from .velocity import velocity_from_weights, weight_from_alpha
from .wavefront import (
    NULL_OBSERVER,
    Wavefront,
    WavefrontObserver,
    WavefrontVertex,
    _planes_identical,
    collapse_edge,
    remove_colinear_vertices,
    resolve_meet,
    split_vertex_in_edge,
)

__all__ = [
    "KineticEvent",
    "StepResult",
    "RobustnessFault",
    "refresh_kinematics",
    "predict",
    "detect_edge_swaps",
    "detect_penetrations",
    "earliest_event_batch",
    "correct",
    "step",
    "settle",
    "admissibility_violations",
]


class RobustnessFault(RuntimeError):
    """The engine reached a state its tolerances cannot disambiguate."""

    def __init__(self, message: str, dump: dict | None = None) -> None:
        super().__init__(message)
        self.dump = dump or {}


@dataclass
class KineticEvent:
    """A detected zero crossing inside one increment.

    ``subject`` is the moving vertex (for collapses, the head of the
    vanishing edge); ``target`` is the head vertex of the penetrated
    edge for splits.  ``contact`` distinguishes a hit on an edge
    interior from a hit on an existing vertex.  Positions and times are
    in the normalized frame.
    """

    kind: str
    dt: float
    xi: float
    subject: int
    target: int | None
    contact: str | None
    loc: Vec2
    loop_key: int
    t_abs: float = 0.0
    z_abs: float = 0.0


@dataclass
class StepResult:
    advanced_dt: float
    advanced_dz: float
    events: list[KineticEvent] = field(default_factory=list)
    status: str = "running"


# ---------------------------------------------------------------------------
# velocities
# ---------------------------------------------------------------------------


def refresh_kinematics(
    w: Wavefront, observer: WavefrontObserver = NULL_OBSERVER
) -> list[WavefrontVertex]:
    """Re-solve all vertex velocities for the current inclinations.

    Velocities live in sweep time: every edge advances at its own
    weight per tick and the vertical rate only converts ticks to
    height, which is what keeps the planar skeleton independent of the
    height schedule.  The solve runs on the ground speeds rather than
    the tilted plane normals so that unit-weight and stationary edges
    move at exactly their nominal speeds.  Returns the vertices whose
    velocity systems are singular (marked colinear); their stale
    velocity is left untouched because they must be removed, not moved.
    A vertex whose velocity actually changes gets a turn notification so
    its trace can corner.
    """
    t = w.t
    active = [w.vertices[i] for i in sorted(w.vertices) if w.vertices[i].active]
    for v in active:
        v.w_prev = weight_from_alpha(v.effective_alpha(t))
    marked: list[WavefrontVertex] = []
    for v in active:
        vel = velocity_from_weights(
            v.n_prev, v.w_prev, v.next.n_prev, v.next.w_prev, w.tol
        )
        if vel is None and v.manual and _planes_identical(v):
            # an interactively inserted vertex rides its (single) plane
            # at the edge's own offset speed until an edit splits it
            vel = Vec2(-v.n_prev.x * v.w_prev, -v.n_prev.y * v.w_prev)
        if vel is None:
            v.colinear = True
            marked.append(v)
        else:
            v.colinear = False
            if vel != v.vel:
                observer.turn(v)
                v.vel = vel
    return marked


def predict(w: Wavefront, dt: float) -> dict[int, Vec2]:
    """Positions after moving every active vertex for ``dt``."""
    return {
        v.id: Vec2(v.pos.x + v.vel.x * dt, v.pos.y + v.vel.y * dt)
        for v in w.vertices.values()
        if v.active
    }


def correct(w: Wavefront, pred: dict[int, Vec2], dt_event: float, dt_n: float) -> None:
    """Pull predicted positions back to the event time."""
    back = dt_event - dt_n
    for v in w.vertices.values():
        if not v.active:
            continue
        p = pred[v.id]
        v.pos = Vec2(p.x + v.vel.x * back, p.y + v.vel.y * back)


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------


def detect_edge_swaps(
    w: Wavefront, pred: dict[int, Vec2], dt_n: float
) -> list[KineticEvent]:
    """Edge collapses: the projected edge length runs out within the increment.

    Lengths are measured along the edge direction frozen at the start
    of the increment, so a swapped (inverted) edge shows up as a sign
    change of the projection.
    """
    eps = w.tol.eps_geom
    events: list[KineticEvent] = []
    for loop in w.active_loops():
        loop_key = loop[0].id
        for v in loop:
            b = v.prev
            u = v.u_prev
            l_n = (v.pos - b.pos).dot(u)
            if l_n < -eps:
                raise RobustnessFault(
                    f"edge into vertex {v.id} is already inverted at increment start",
                    w.dump(),
                )
            l_np1 = (pred[v.id] - pred[b.id]).dot(u)
            if l_n <= eps:
                if l_np1 > eps:
                    continue  # newborn edge opening up
                xi = -1.0
            else:
                maybe = zero_crossing_xi(l_n, l_np1, eps)
                if maybe is None:
                    continue
                xi = maybe
            dt_e = xi_to_dt(xi, dt_n)
            loc = Vec2(v.pos.x + v.vel.x * dt_e, v.pos.y + v.vel.y * dt_e)
            events.append(
                KineticEvent("collapse", dt_e, xi, v.id, None, None, loc, loop_key)
            )
    return events


def _swept_bbox(a: Vec2, b: Vec2, pad: float) -> tuple[float, float, float, float]:
    return (
        min(a.x, b.x) - pad,
        min(a.y, b.y) - pad,
        max(a.x, b.x) + pad,
        max(a.y, b.y) + pad,
    )


def detect_penetrations(
    w: Wavefront, pred: dict[int, Vec2], dt_n: float
) -> list[KineticEvent]:
    """Edge splits: a vertex crosses the support line of a non-incident
    edge while the crossing point lies inside the moving edge segment.

    Candidate edges are every active edge except the two incident to
    the vertex; crossings in either direction count.  A vertex starting
    on the line (post-surgery contact) is not re-reported: only genuine
    sign changes inside the increment qualify.
    """
    eps = w.tol.eps_geom
    events: list[KineticEvent] = []
    loops = w.active_loops()

    verts: list[tuple[WavefrontVertex, int, tuple[float, float, float, float]]] = []
    edges: list[tuple[WavefrontVertex, tuple[float, float, float, float]]] = []
    for loop in loops:
        loop_key = loop[0].id
        for v in loop:
            verts.append((v, loop_key, _swept_bbox(v.pos, pred[v.id], eps)))
            hb = _swept_bbox(v.pos, pred[v.id], eps)
            tb = _swept_bbox(v.prev.pos, pred[v.prev.id], eps)
            edges.append(
                (v, (min(hb[0], tb[0]), min(hb[1], tb[1]), max(hb[2], tb[2]), max(hb[3], tb[3])))
            )

    for p_vert, loop_key, pb in verts:
        for h_vert, eb in edges:
            if h_vert is p_vert or h_vert is p_vert.next:
                continue
            if pb[0] > eb[2] or pb[2] < eb[0] or pb[1] > eb[3] or pb[3] < eb[1]:
                continue
            a_vert = h_vert.prev
            n = h_vert.n_prev
            g_n = (p_vert.pos - a_vert.pos).dot(n)
            if abs(g_n) <= eps:
                continue
            g_np1 = (pred[p_vert.id] - pred[a_vert.id]).dot(n)
            xi = zero_crossing_xi(g_n, g_np1, eps)
            if xi is None:
                continue
            dt_e = xi_to_dt(xi, dt_n)
            p_e = Vec2(p_vert.pos.x + p_vert.vel.x * dt_e, p_vert.pos.y + p_vert.vel.y * dt_e)
            a_e = Vec2(a_vert.pos.x + a_vert.vel.x * dt_e, a_vert.pos.y + a_vert.vel.y * dt_e)
            b_e = Vec2(h_vert.pos.x + h_vert.vel.x * dt_e, h_vert.pos.y + h_vert.vel.y * dt_e)
            u = h_vert.u_prev
            tau = (p_e - a_e).dot(u)
            length = (b_e - a_e).dot(u)
            if tau < -eps or tau > length + eps:
                continue
            contact = "vertex" if (tau <= eps or tau >= length - eps) else "edge"
            events.append(
                KineticEvent("split", dt_e, xi, p_vert.id, h_vert.id, contact, p_e, loop_key)
            )
    return events


def earliest_event_batch(
    events: list[KineticEvent], dt_n: float, tol: Tolerances
) -> tuple[float | None, list[KineticEvent]]:
    """Earliest event time plus everything inside the simultaneity window."""
    if not events:
        return None, []
    dt_min = min(e.dt for e in events)
    window = tol.eps_time_cluster * dt_n
    batch = [e for e in events if e.dt <= dt_min + window]
    return dt_min, batch


# ---------------------------------------------------------------------------
# applying a batch
# ---------------------------------------------------------------------------


def _find_containing_edge(
    w: Wavefront, p: WavefrontVertex
) -> tuple[WavefrontVertex, float, float] | None:
    """Current edge whose segment passes through ``p``'s position.

    Used to re-validate split events after earlier surgery in the same
    batch may have re-shaped the target edge.  Returns the head vertex,
    the tangential coordinate and the segment length.
    """
    eps = 10.0 * w.tol.eps_geom
    best: tuple[float, WavefrontVertex, float, float] | None = None
    for h_vert in (w.vertices[i] for i in sorted(w.vertices)):
        if not h_vert.active or h_vert is p or h_vert is p.next:
            continue
        a = h_vert.prev.pos
        u = h_vert.u_prev
        d = p.pos - a
        tau = d.dot(u)
        length = (h_vert.pos - a).dot(u)
        if tau < -eps or tau > length + eps:
            continue
        perp = abs(d.cross(u))
        if perp > eps:
            continue
        if best is None or perp < best[0]:
            best = (perp, h_vert, tau, length)
    if best is None:
        return None
    return best[1], best[2], best[3]


def _apply_batch(
    w: Wavefront, batch: list[KineticEvent], observer: WavefrontObserver
) -> None:
    eps = w.tol.eps_geom
    near = 10.0 * eps

    collapses = sorted(
        (e for e in batch if e.kind == "collapse"), key=lambda e: (e.loop_key, e.subject)
    )
    splits = sorted(
        (e for e in batch if e.kind == "split"), key=lambda e: (e.loop_key, e.subject, e.target or -1)
    )

    for ev in collapses:
        v = w.vertices.get(ev.subject)
        if v is None or not v.active:
            continue
        if v.pos.dist(v.prev.pos) > near:
            continue  # stale: earlier surgery moved the goalposts
        if len(w.loop_of(v)) < 3:
            continue  # terminal-sized; the settle pass freezes it
        collapse_edge(w, v, observer)

    # group split events by location so simultaneous hits resolve together
    clusters: list[tuple[Vec2, list[KineticEvent]]] = []
    for ev in splits:
        for loc, group in clusters:
            if loc.dist(ev.loc) <= near:
                group.append(ev)
                break
        else:
            clusters.append((ev.loc, [ev]))

    for loc, group in clusters:
        meet_expected = False
        for ev in group:
            p = w.vertices.get(ev.subject)
            if p is None or not p.active or p.pos.dist(loc) > near:
                continue
            hit = _find_containing_edge(w, p)
            if hit is None:
                continue
            h_vert, tau, length = hit
            if tau <= eps or tau >= length - eps:
                meet_expected = True
                continue
            split_vertex_in_edge(w, p, h_vert, observer)
        cluster_verts = [
            w.vertices[i]
            for i in sorted(w.vertices)
            if w.vertices[i].active and w.vertices[i].pos.dist(loc) <= near
        ]
        if len(cluster_verts) >= 2 and (meet_expected or len(cluster_verts) > 2):
            resolve_meet(w, cluster_verts, observer)


# ---------------------------------------------------------------------------
# settling and stepping
# ---------------------------------------------------------------------------


def _settle(w: Wavefront, observer: WavefrontObserver) -> None:
    """Drive the wavefront to a state with no immediate degeneracies.

    Alternates velocity refresh, colinear removal, collapse of edges
    that are already zero length and still shrinking, and freezing of
    terminal-sized loops, until nothing changes.
    """
    eps = w.tol.eps_geom
    limit = 64 + 4 * len(w.vertices)
    for _ in range(limit):
        marked = refresh_kinematics(w, observer)
        if remove_colinear_vertices(w, marked, observer):
            continue

        collapsed = False
        for vid in sorted(w.vertices):
            v = w.vertices[vid]
            if not v.active:
                continue
            b = v.prev
            if v.pos.dist(b.pos) > eps:
                continue
            shrink = (v.vel - b.vel).dot(v.u_prev)
            if shrink > eps:
                continue  # newborn edge opening up
            if len(w.loop_of(v)) >= 3:
                collapse_edge(w, v, observer)
                collapsed = True
                break
        if collapsed:
            continue

        froze = False
        for loop in w.active_loops():
            if len(loop) <= 2:
                observer.terminal_loop(loop)
                w.freeze_loop(loop)
                froze = True
        if froze:
            continue
        return
    raise RobustnessFault("cascade of degeneracies did not settle", w.dump())


def settle(w: Wavefront, observer: WavefrontObserver = NULL_OBSERVER) -> None:
    """Public entry to the degeneracy-settling pass, for use after edits."""
    _settle(w, observer)


def step(
    w: Wavefront,
    dt_requested: float,
    vz: float,
    observer: WavefrontObserver = NULL_OBSERVER,
) -> StepResult:
    """Advance by at most ``dt_requested``, truncating at the first events.

    Velocities are refreshed before prediction, so the caller only has
    to pick the vertical rate.  On return either the full increment was
    committed with no events, or the wavefront sits exactly at the
    event time with all simultaneous surgery applied and follow-up
    degeneracies settled.
    """
    if w.is_terminated():
        return StepResult(0.0, 0.0, [], "terminated")
    if dt_requested <= 0.0:
        return StepResult(0.0, 0.0, [], "running")

    _settle(w, observer)
    if w.is_terminated():
        return StepResult(0.0, 0.0, [], "terminated")

    dt_n = dt_requested
    pred = predict(w, dt_n)
    events = detect_edge_swaps(w, pred, dt_n)
    events += detect_penetrations(w, pred, dt_n)
    dt_min, batch = earliest_event_batch(events, dt_n, w.tol)

    if dt_min is None:
        for v in w.vertices.values():
            if v.active:
                v.pos = pred[v.id]
        w.t += dt_n
        w.z += vz * dt_n
        observer.record_snapshot(w, [])
        return StepResult(dt_n, vz * dt_n, [], "running")

    correct(w, pred, dt_min, dt_n)
    w.t += dt_min
    w.z += vz * dt_min
    for ev in batch:
        ev.t_abs = w.t
        ev.z_abs = w.z
    _apply_batch(w, batch, observer)
    _settle(w, observer)
    observer.record_snapshot(w, batch)
    status = "terminated" if w.is_terminated() else "running"
    return StepResult(dt_min, vz * dt_min, batch, status)


# ---------------------------------------------------------------------------
# admissibility probe
# ---------------------------------------------------------------------------


def admissibility_violations(w: Wavefront) -> list[tuple[str, int, int]]:
    """Zero-length re-probe: configurations that should have been resolved.

    Reports inverted edges, zero-length edges still shrinking, and
    vertices resting on a non-incident edge interior while approaching
    it.  A clean engine state returns an empty list after every
    committed increment.
    """
    eps = w.tol.eps_geom
    out: list[tuple[str, int, int]] = []
    loops = w.active_loops()
    for loop in loops:
        for v in loop:
            b = v.prev
            l_n = (v.pos - b.pos).dot(v.u_prev)
            if l_n < -eps:
                out.append(("inverted_edge", v.id, b.id))
            elif l_n <= eps and (v.vel - b.vel).dot(v.u_prev) < -eps:
                out.append(("stuck_collapse", v.id, b.id))
    all_verts = [v for loop in loops for v in loop]
    for p in all_verts:
        for h_vert in all_verts:
            if h_vert is p or h_vert is p.next:
                continue
            a = h_vert.prev
            g = (p.pos - a.pos).dot(h_vert.n_prev)
            if abs(g) > eps:
                continue
            gdot = (p.vel - a.vel).dot(h_vert.n_prev)
            if gdot >= -eps:
                continue
            tau = (p.pos - a.pos).dot(h_vert.u_prev)
            length = (h_vert.pos - a.pos).dot(h_vert.u_prev)
            if eps < tau < length - eps:
                out.append(("stuck_split", p.id, h_vert.id))
    return out

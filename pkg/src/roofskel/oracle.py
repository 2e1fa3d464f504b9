"""Independent reference computations used to cross-check the engine.

Two routes that deliberately avoid the predictor-corrector machinery:

* :func:`convex_bisector_skeleton` builds the weighted skeleton of a
  convex polygon directly from its moving offset lines.  Offset-line
  intersections are linear in the sweep height, so every candidate
  event is the exact solution of a 3x3 linear system and no time
  stepping is involved at all.

* :func:`dense_replay` integrates the wavefront with a fixed tiny time
  step and detects events by raw geometric proximity thresholds
  instead of zero-crossing interpolation.  It shares the surgery
  routines (the discrete rewiring rules are part of the model, not of
  the numerics under test) but none of the event prediction.

Both report plain tuples so comparisons stay decoupled from the engine
data model.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .geom import Tolerances, Vec2, signed_area
from .kinetics import _settle
from .velocity import weight_from_alpha
from .wavefront import (
    NULL_OBSERVER,
    Wavefront,
    build_wavefront,
    collapse_edge,
    merge_vertex_on_vertex,
    resolve_meet,
    split_vertex_in_edge,
)

__all__ = [
    "convex_bisector_skeleton",
    "dense_replay",
    "ReplayResult",
    "OracleReport",
    "verify_skeleton",
    "graph_event_log",
    "match_node_sets",
    "arcs_match",
    "cluster_events",
    "compare_event_logs",
]

_EPS = 1e-12


# ---------------------------------------------------------------------------
# convex reference skeleton
# ---------------------------------------------------------------------------


def _line_pair_point(n1: Vec2, c1: float, n2: Vec2, c2: float) -> Vec2 | None:
    det = n1.x * n2.y - n1.y * n2.x
    if abs(det) <= _EPS:
        return None
    return Vec2((c1 * n2.y - c2 * n1.y) / det, (n1.x * c2 - n2.x * c1) / det)


def convex_bisector_skeleton(
    points: list[Vec2] | list[tuple[float, float]],
    alphas: list[float],
    tol: float = 1e-9,
) -> tuple[list[tuple[float, float, float, str]], list[tuple[int, int]]]:
    """Weighted skeleton of a convex CCW polygon from its offset lines.

    Edge ``i`` joins point ``i`` to point ``i + 1`` and carries wall
    inclination ``alphas[i]``.  The offset line of edge ``i`` at height
    ``z`` is ``n_i . x = c_i - w_i z`` with ``w_i = cot(alpha_i)``, so
    three consecutive lines become concurrent at the solution of one
    3x3 system: those concurrences, processed in height order over a
    shrinking cycle of live lines, are exactly the skeleton nodes.

    Returns ``(nodes, arcs)`` with nodes as ``(x, y, z, kind)`` and
    arcs as index pairs into the node list.
    """
    pts = [Vec2(float(p[0]), float(p[1])) for p in points]
    n = len(pts)
    if n < 3:
        raise ValueError("need at least three points")
    if signed_area(pts) <= 0.0:
        raise ValueError("points must wind counterclockwise")
    if len(alphas) != n:
        raise ValueError("one inclination per edge required")

    normals: list[Vec2] = []
    offsets: list[float] = []
    speeds: list[float] = []
    for i in range(n):
        u = (pts[(i + 1) % n] - pts[i]).normalized()
        nrm = u.perp_right()
        normals.append(nrm)
        offsets.append(nrm.dot(pts[i]))
        speeds.append(weight_from_alpha(alphas[i]))

    nodes: list[tuple[float, float, float, str]] = []

    def ensure_node(x: float, y: float, z: float, kind: str) -> int:
        for idx, (nx, ny, nz, _) in enumerate(nodes):
            if abs(nx - x) <= tol and abs(ny - y) <= tol and abs(nz - z) <= tol:
                return idx
        nodes.append((x, y, z, kind))
        return len(nodes) - 1

    for p in pts:
        ensure_node(p.x, p.y, 0.0, "input")

    arcs: list[tuple[int, int]] = []
    prv = {i: (i - 1) % n for i in range(n)}
    nxt = {i: (i + 1) % n for i in range(n)}
    live = set(range(n))
    # pair (i, nxt[i]) -> node where that moving vertex was last (re)born
    birth = {(prv[i], i): i for i in range(n)}

    def event_for(j: int) -> tuple[float, float, float] | None:
        """Height and point where line j's two neighbours pinch it out."""
        i, k = prv[j], nxt[j]
        a = np.array(
            [
                [normals[i].x, normals[i].y, speeds[i]],
                [normals[j].x, normals[j].y, speeds[j]],
                [normals[k].x, normals[k].y, speeds[k]],
            ]
        )
        b = np.array([offsets[i], offsets[j], offsets[k]])
        try:
            x, y, z = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            return None
        if not np.isfinite(z):
            return None
        return float(z), float(x), float(y)

    heap: list[tuple[float, int, int, int, int]] = []
    seq = 0
    z_now = 0.0

    def push(j: int) -> None:
        nonlocal seq
        ev = event_for(j)
        if ev is None:
            return
        z, x, y = ev
        if z < z_now - tol:
            return
        heapq.heappush(heap, (z, seq, j, prv[j], nxt[j]))
        seq += 1

    for j in range(n):
        push(j)

    while len(live) > 2 and heap:
        z, _, j, i, k = heapq.heappop(heap)
        if j not in live or prv[j] != i or nxt[j] != k:
            continue
        ev = event_for(j)
        if ev is None:
            continue
        z, x, y = ev
        z_now = max(z_now, z)
        node = ensure_node(x, y, z, "collapse")
        for pair in ((i, j), (j, k)):
            if birth[pair] != node:
                arcs.append((birth[pair], node))
        live.discard(j)
        nxt[i], prv[k] = k, i
        birth[(i, k)] = node
        push(i)
        push(k)

    if len(live) == 2:
        i, k = sorted(live)
        a, b = birth[(i, k)], birth[(k, i)]
        if a != b:
            arcs.append((a, b))

    return nodes, arcs


# ---------------------------------------------------------------------------
# dense replay
# ---------------------------------------------------------------------------


@dataclass
class ReplayResult:
    events: list[tuple[float, str, float, float]] = field(default_factory=list)
    t_end: float = 0.0
    terminated: bool = False
    inconclusive: list[str] = field(default_factory=list)
    #: coarsest event localisation the replay could achieve, in world units;
    #: comparisons against another event log should allow this much slack
    resolution: float = 0.0


def _replay_arrays(w: Wavefront):
    verts = [w.vertices[i] for i in sorted(w.vertices) if w.vertices[i].active]
    index = {v.id: i for i, v in enumerate(verts)}
    pos = np.array([[v.pos.x, v.pos.y] for v in verts])
    vel = np.array([[v.vel.x, v.vel.y] for v in verts])
    prev = np.array([index[v.prev.id] for v in verts])
    nxt = np.array([index[v.next.id] for v in verts])
    uvec = np.array([[v.u_prev.x, v.u_prev.y] for v in verts])
    nvec = np.array([[v.n_prev.x, v.n_prev.y] for v in verts])
    return verts, pos, vel, prev, nxt, uvec, nvec


def dense_replay(
    loops,
    alphas,
    vz: float = 1.0,
    dt_small: float = 1e-4,
    t_max: float = 16.0,
    tol: Tolerances | None = None,
) -> ReplayResult:
    """Integrate the wavefront with raw fixed steps and proximity tests.

    Events are recorded in world coordinates and world time as
    ``(t, kind, x, y)`` with kinds ``collapse`` and ``split`` (the
    latter covering vertex-on-vertex contacts too).  Detection
    thresholds scale with ``dt_small`` times the current speed bound,
    so a finer step localises events proportionally better.
    Configurations the thresholds cannot classify are reported in
    ``inconclusive`` rather than guessed at.
    """
    w = build_wavefront(loops, alphas, tol=tol)
    frame = w.frame
    out = ReplayResult()
    _settle(w, NULL_OBSERVER)
    if w.is_terminated():
        out.terminated = True
        return out

    t = 0.0
    guard_steps = int(t_max / dt_small) + 8
    for _ in range(guard_steps):
        verts, pos, vel, prev, nxt, uvec, nvec = _replay_arrays(w)
        m = len(verts)
        if m == 0:
            break
        vmax = max(1e-9, float(np.max(np.hypot(vel[:, 0], vel[:, 1]))))
        thresh = 3.0 * vmax * dt_small
        out.resolution = max(out.resolution, frame.z_to_world(5.0 * thresh))

        incident = np.zeros((m, m), dtype=bool)
        idx = np.arange(m)
        incident[idx, idx] = True
        incident[idx, nxt] = True

        # Sign memory for vertex/edge gaps: a pair only fires once its gap
        # flips against the last confidently-known sign.  Right after
        # surgery, positions carry snapping offsets up to the detection
        # threshold, so arming needs a full-threshold standoff there;
        # during clean stepping a much finer floor suffices.  Pairs born
        # in contact (twins of a split) start unarmed and therefore never
        # re-fire on the contact they were created with.
        arm_floor = 1e-10
        rel = pos[:, None, :] - pos[prev][None, :, :]
        gaps = np.einsum("pek,ek->pe", rel, nvec)
        sign_state = np.where(np.abs(gaps) > thresh, np.sign(gaps), 0.0)

        hit_t = None
        micro = 0
        while t + dt_small <= t_max:
            pos += vel * dt_small
            t += dt_small
            micro += 1

            # collapses: projected length of each edge (prev -> self)
            d = pos - pos[prev]
            lengths = np.einsum("ij,ij->i", d, uvec)
            ldots = np.einsum("ij,ij->i", vel - vel[prev], uvec)
            col_mask = (lengths < thresh) & (ldots < 1e-12)

            # splits: a vertex crossed the support line of a non-incident
            # edge (edge j runs from vertex prev[j] to vertex j)
            rel = pos[:, None, :] - pos[prev][None, :, :]
            gaps = np.einsum("pek,ek->pe", rel, nvec)
            taus = np.einsum("pek,ek->pe", rel, uvec)
            confident = np.abs(gaps) > arm_floor
            crossed = confident & (sign_state != 0.0) & (np.sign(gaps) != sign_state)
            contained = (taus > -thresh) & (taus < lengths[None, :] + thresh)
            split_mask = crossed & contained & ~incident

            if col_mask.any() or split_mask.any():
                hit_t = t
                break
            sign_state = np.where(confident, np.sign(gaps), sign_state)
        if hit_t is None:
            break

        # write integrated state back and apply the detected surgery
        for v, p in zip(verts, pos):
            v.pos = Vec2(float(p[0]), float(p[1]))
        w.t = t
        w.z += vz * dt_small * micro

        for i in np.flatnonzero(col_mask):
            v = verts[int(i)]
            b = v.prev
            if not (v.active and b.active) or v is b:
                continue
            if v.pos.dist(b.pos) > 2.0 * thresh or len(w.loop_of(v)) < 3:
                continue
            mid = Vec2(0.5 * (v.pos.x + b.pos.x), 0.5 * (v.pos.y + b.pos.y))
            wp = frame.to_world(mid)
            v.pos = b.pos = mid
            collapse_edge(w, v, NULL_OBSERVER)
            out.events.append((frame.z_to_world(t), "collapse", wp.x, wp.y))

        for p_i, e_i in zip(*np.nonzero(split_mask)):
            p_vert = verts[int(p_i)]
            h_vert = verts[int(e_i)]
            a_vert = h_vert.prev
            if not (p_vert.active and h_vert.active and a_vert.active):
                continue
            if h_vert is p_vert or h_vert is p_vert.next or a_vert is p_vert:
                continue
            u = h_vert.u_prev
            span = (h_vert.pos - a_vert.pos).dot(u)
            tau = (p_vert.pos - a_vert.pos).dot(u)
            gap = (p_vert.pos - a_vert.pos).dot(h_vert.n_prev)
            if abs(gap) > 2.0 * thresh or tau < -2.0 * thresh or tau > span + 2.0 * thresh:
                continue  # earlier surgery in this step already moved things
            wp = frame.to_world(p_vert.pos)
            d_tail = p_vert.pos.dist(a_vert.pos)
            d_head = p_vert.pos.dist(h_vert.pos)
            if min(d_tail, d_head) <= 3.0 * thresh:
                # proximity to an endpoint, not to the edge interior: a
                # vertex-on-vertex contact, or merely the precursor of an
                # adjacent edge collapse (which the collapse pass owns)
                q_vert = a_vert if d_tail <= d_head else h_vert
                if q_vert is p_vert.next or q_vert.next is p_vert or q_vert is p_vert:
                    continue
                spot = q_vert.pos
                cluster = [
                    v
                    for v in w.vertices.values()
                    if v.active and v.pos.dist(spot) <= 3.0 * thresh
                ]
                if p_vert not in cluster:
                    cluster.append(p_vert)
                for v in cluster:
                    v.pos = spot
                if len(cluster) > 2:
                    resolve_meet(w, cluster, NULL_OBSERVER)
                else:
                    merge_vertex_on_vertex(w, p_vert, q_vert, NULL_OBSERVER)
            elif thresh < tau < span - thresh:
                foot = Vec2(p_vert.pos.x - gap * h_vert.n_prev.x, p_vert.pos.y - gap * h_vert.n_prev.y)
                p_vert.pos = foot
                split_vertex_in_edge(w, p_vert, h_vert, NULL_OBSERVER)
            else:
                continue  # ambiguous zone between interior and endpoint
            out.events.append((frame.z_to_world(t), "split", wp.x, wp.y))

        try:
            _settle(w, NULL_OBSERVER)
        except Exception as exc:  # noqa: BLE001 - report, don't guess
            out.inconclusive.append(f"settle failed after surgery at t={t:.6f}: {exc}")
            break
        if w.is_terminated():
            out.terminated = True
            break

    out.t_end = frame.z_to_world(t)
    return out


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------


def graph_event_log(graph, vz: float = 1.0) -> list[tuple[float, str, float, float]]:
    """Collapse/split nodes of a world-frame skeleton graph as an event log.

    Only valid for runs with a constant vertical rate, where a node's
    height divided by that rate is its event time.
    """
    return [
        (n.z / vz, n.kind, n.pos.x, n.pos.y)
        for n in graph.nodes
        if n.kind in ("collapse", "split")
    ]


def match_node_sets(
    got: list[tuple[float, float, float]],
    want: list[tuple[float, float, float]],
    tol: float,
) -> dict[int, int] | None:
    """One-to-one matching of two point sets within ``tol`` per axis.

    Returns the index mapping ``got -> want`` or None when any point
    lacks a unique partner.
    """
    if len(got) != len(want):
        return None
    mapping: dict[int, int] = {}
    used: set[int] = set()
    for gi, (gx, gy, gz) in enumerate(got):
        hits = [
            wi
            for wi, (wx, wy, wz) in enumerate(want)
            if abs(gx - wx) <= tol and abs(gy - wy) <= tol and abs(gz - wz) <= tol
        ]
        if len(hits) != 1 or hits[0] in used:
            return None
        mapping[gi] = hits[0]
        used.add(hits[0])
    return mapping


def arcs_match(
    got_arcs: list[tuple[int, int]],
    want_arcs: list[tuple[int, int]],
    mapping: dict[int, int],
) -> bool:
    """Arc sets agree as undirected pairs under a node mapping."""
    a = sorted(tuple(sorted((mapping[p], mapping[q]))) for p, q in got_arcs)
    b = sorted(tuple(sorted((p, q))) for p, q in want_arcs)
    return a == b


def cluster_events(
    events: list[tuple[float, str, float, float]], tol_t: float, tol_p: float
) -> list[tuple[float, str, float, float]]:
    """Collapse duplicate detections of one physical event into one entry."""
    reps: list[tuple[float, str, float, float]] = []
    for t, kind, x, y in sorted(events):
        for i, (rt, rk, rx, ry) in enumerate(reps):
            if rk == kind and abs(t - rt) <= tol_t and math.hypot(x - rx, y - ry) <= tol_p:
                break
        else:
            reps.append((t, kind, x, y))
    return reps


def compare_event_logs(
    got: list[tuple[float, str, float, float]],
    want: list[tuple[float, str, float, float]],
    tol_t: float,
    tol_p: float,
) -> list[str]:
    """Symmetric difference of two clustered event logs, as messages."""
    a = cluster_events(got, tol_t, tol_p)
    b = cluster_events(want, tol_t, tol_p)
    problems: list[str] = []
    for label, src, dst in (("missing", b, a), ("extra", a, b)):
        for t, kind, x, y in src:
            ok = any(
                kind == k2 and abs(t - t2) <= tol_t and math.hypot(x - x2, y - y2) <= tol_p
                for t2, k2, x2, y2 in dst
            )
            if not ok:
                problems.append(f"{label} {kind} at t={t:.6f} ({x:.6f}, {y:.6f})")
    return problems


# ---------------------------------------------------------------------------
# one-call verification
# ---------------------------------------------------------------------------


@dataclass
class OracleReport:
    max_position_error: float = 0.0
    event_sequence_match: bool = True
    face_count_match: bool = True
    notes: str = ""

    @property
    def ok(self) -> bool:
        return self.event_sequence_match and self.face_count_match


def _is_strictly_convex(pts: list[Vec2]) -> bool:
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        if (b - a).cross(c - b) <= 1e-12:
            return False
    return True


def verify_skeleton(loops, alphas, graph, vz: float = 1.0) -> OracleReport:
    """Cross-check a terminated world-frame skeleton against an oracle.

    Strictly convex single loops are checked node-for-node (and arc
    isomorphism) against the offset-line construction; everything else
    is checked on event sequence against a dense replay, at the
    resolution the replay itself reports.
    """
    rep = OracleReport()
    edge_total = sum(len(r) for r in loops)
    faces = len(graph.faces)
    rep.face_count_match = faces == edge_total
    if not rep.face_count_match:
        rep.notes += f"face count {faces} != edge count {edge_total}; "

    pts = [Vec2(float(p[0]), float(p[1])) for p in loops[0]]
    if len(loops) == 1 and signed_area(pts) < 0.0:
        pts.reverse()
        alphas = list(reversed(alphas))
    if len(loops) == 1 and _is_strictly_convex(pts):
        want_nodes, want_arcs = convex_bisector_skeleton(pts, list(alphas))
        got = [(n.pos.x, n.pos.y, n.z / vz) for n in graph.nodes]
        want = [(x, y, z) for x, y, z, _ in want_nodes]
        tol = 1e-6 * max(max(abs(p.x) for p in pts), max(abs(p.y) for p in pts), 1.0)
        mapping = match_node_sets(got, want, tol)
        if mapping is None:
            rep.event_sequence_match = False
            rep.notes += f"node sets differ ({len(got)} vs {len(want)}); "
            return rep
        rep.max_position_error = max(
            (
                max(abs(g[0] - want[mapping[i]][0]), abs(g[1] - want[mapping[i]][1]))
                for i, g in enumerate(got)
            ),
            default=0.0,
        )
        got_arcs = [(a.a, a.b) for a in graph.arcs]
        if not arcs_match(got_arcs, want_arcs, mapping):
            rep.event_sequence_match = False
            rep.notes += "arc adjacency differs; "
        return rep

    replay = dense_replay(loops, alphas, vz=vz)
    if replay.inconclusive:
        rep.notes += "; ".join(replay.inconclusive) + "; "
    tol = max(replay.resolution, 1e-9)
    diffs = compare_event_logs(graph_event_log(graph, vz), replay.events, tol, tol)
    if diffs:
        rep.event_sequence_match = False
        rep.notes += "; ".join(diffs) + "; "
    got_log = cluster_events(graph_event_log(graph, vz), tol, tol)
    want_log = cluster_events(replay.events, tol, tol)
    for t, kind, x, y in got_log:
        best = min(
            (
                math.hypot(x - x2, y - y2)
                for t2, k2, x2, y2 in want_log
                if k2 == kind and abs(t - t2) <= tol
            ),
            default=None,
        )
        if best is not None:
            rep.max_position_error = max(rep.max_position_error, best)
    return rep

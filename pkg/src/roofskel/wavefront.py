"""Deforming-polygon wavefront: linked vertex loops and their surgery.

The wavefront is a set of circular doubly-linked vertex loops.  Outer
loops run counterclockwise and holes clockwise, so the outward normal
of every edge is the travel direction rotated by -90 degrees and the
solid region always lies on the left of travel.  Each vertex owns the
edge arriving at it (``prev -> vertex``) and carries that edge's frozen
unit direction, outward normal, inclination and identity.  Edges only
ever translate, so the frozen direction stays valid for the whole life
of the edge.

Topology changes are confined to four surgical operations: collapsing
a zero-length edge, splitting a loop where a vertex penetrates an edge,
exchanging next-links where two vertices meet, and removing colinear
vertices whose incident roof planes have become linearly dependent.
Loops reduced to two vertices or fewer are terminal: they freeze in
place and drop out of all further kinetics.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

from .geom import (
    NormFrame,
    Tolerances,
    Vec2,
    polygon_contains,
    segments_properly_intersect,
    signed_area,
)
from .velocity import clamp_alpha

__all__ = [
    "WavefrontError",
    "SurgeryError",
    "WavefrontVertex",
    "WavefrontObserver",
    "Wavefront",
    "build_wavefront",
    "collapse_edge",
    "split_vertex_in_edge",
    "merge_vertex_on_vertex",
    "resolve_meet",
    "remove_colinear_vertices",
    "insert_vertex_manual",
    "remove_vertex_manual",
]


class WavefrontError(ValueError):
    """Raised when an input polygon cannot form a valid wavefront."""


class SurgeryError(RuntimeError):
    """Raised when a surgical operation is applied to an invalid site."""


class WavefrontVertex:
    """One corner of the moving front.

    ``u_prev``/``n_prev``/``alpha_prev`` describe the edge from ``prev``
    to this vertex.  ``edge_key`` is the flat input-edge index that this
    edge descends from; ``frag`` distinguishes fragments of a split
    edge.  ``w_prev`` caches the ground speed of the incoming edge for
    the currently effective inclination.
    """

    __slots__ = (
        "id",
        "pos",
        "vel",
        "u_prev",
        "n_prev",
        "alpha_prev",
        "start_prev",
        "edge_key",
        "frag",
        "w_prev",
        "prev",
        "next",
        "active",
        "colinear",
        "split_origin",
        "collapse_origin",
        "manual",
    )

    def __init__(
        self,
        vid: int,
        pos: Vec2,
        u_prev: Vec2,
        n_prev: Vec2,
        alpha_prev: float,
        edge_key: int,
        frag: int = 0,
        start_prev: float = 0.0,
    ) -> None:
        self.id = vid
        self.pos = pos
        self.vel = Vec2(0.0, 0.0)
        self.u_prev = u_prev
        self.n_prev = n_prev
        self.alpha_prev = alpha_prev
        self.start_prev = start_prev
        self.edge_key = edge_key
        self.frag = frag
        self.w_prev = 0.0
        self.prev: "WavefrontVertex" = self
        self.next: "WavefrontVertex" = self
        self.active = True
        self.colinear = False
        self.split_origin = False
        self.collapse_origin = False
        self.manual = False

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"WavefrontVertex(id={self.id}, pos=({self.pos.x:.6g}, {self.pos.y:.6g}),"
            f" edge={self.edge_key}.{self.frag}, active={self.active})"
        )

    def effective_alpha(self, t: float) -> float:
        """Inclination in force at time ``t``; edges not yet started are walls.

        The comparison leaves a little slack so an increment truncated
        exactly at a start boundary activates the edge despite rounding.
        """
        if t < self.start_prev - 1e-12:
            return 0.5 * math.pi
        return self.alpha_prev


class WavefrontObserver:
    """Callbacks through which surgery reports trace geometry.

    The skeleton builder implements these; the default implementation
    ignores everything so the wavefront can be exercised standalone.
    ``arc_end`` must be invoked before links change, while the face
    adjacency of the dying arc is still current.
    """

    def arc_start(self, v: WavefrontVertex, kind: str = "turn") -> None:  # pragma: no cover
        pass

    def arc_end(self, v: WavefrontVertex, kind: str, faces: tuple[int, int]) -> None:  # pragma: no cover
        pass

    def face_closure(self, face_a: int, face_b: int, p_a: Vec2, p_b: Vec2) -> None:  # pragma: no cover
        pass

    def turn(self, v: WavefrontVertex) -> None:  # pragma: no cover
        """Velocity discontinuity at the vertex's current position."""

    def terminal_loop(self, loop: Sequence[WavefrontVertex]) -> None:  # pragma: no cover
        pass

    def record_snapshot(self, w: "Wavefront", events: Sequence[object]) -> None:  # pragma: no cover
        pass


NULL_OBSERVER = WavefrontObserver()


class Wavefront:
    """All live and terminal loops plus the shared bookkeeping counters."""

    def __init__(self, tol: Tolerances, frame: NormFrame) -> None:
        self.tol = tol
        self.frame = frame
        self.vertices: dict[int, WavefrontVertex] = {}
        self.terminal_loops: list[list[WavefrontVertex]] = []
        self.t = 0.0
        self.z = 0.0
        self._next_id = 0
        self._next_frag: dict[int, int] = {}
        self.edge_count = 0

    # -- construction helpers ------------------------------------------------

    def new_vertex(
        self,
        pos: Vec2,
        u_prev: Vec2,
        n_prev: Vec2,
        alpha_prev: float,
        edge_key: int,
        frag: int = 0,
        start_prev: float = 0.0,
    ) -> WavefrontVertex:
        v = WavefrontVertex(self._next_id, pos, u_prev, n_prev, alpha_prev, edge_key, frag, start_prev)
        self._next_id += 1
        self.vertices[v.id] = v
        return v

    def next_fragment(self, edge_key: int) -> int:
        n = self._next_frag.get(edge_key, 0) + 1
        self._next_frag[edge_key] = n
        return n

    # -- queries ---------------------------------------------------------------

    def active_vertices(self) -> list[WavefrontVertex]:
        return [v for v in self.vertices.values() if v.active]

    def loop_of(self, v: WavefrontVertex) -> list[WavefrontVertex]:
        out = [v]
        cur = v.next
        while cur is not v:
            out.append(cur)
            if len(out) > len(self.vertices) + 1:
                raise SurgeryError("linked-list walk did not close; structure corrupt")
            cur = cur.next
        return out

    def active_loops(self) -> list[list[WavefrontVertex]]:
        """Active loops, each started at its lowest vertex id, sorted by it."""
        seen: set[int] = set()
        loops: list[list[WavefrontVertex]] = []
        for vid in sorted(self.vertices):
            v = self.vertices[vid]
            if not v.active or vid in seen:
                continue
            loop = self.loop_of(v)
            seen.update(u.id for u in loop)
            loops.append(loop)
        return loops

    def is_terminated(self) -> bool:
        return not any(v.active for v in self.vertices.values())

    def material_area(self) -> float:
        """Signed area summed over active loops (holes count negative)."""
        return sum(signed_area([u.pos for u in loop]) for loop in self.active_loops())

    def check_links(self) -> None:
        for v in self.active_vertices():
            if v.next.prev is not v or v.prev.next is not v:
                raise SurgeryError(f"broken links at vertex {v.id}")

    def freeze_loop(self, loop: Sequence[WavefrontVertex]) -> None:
        for v in loop:
            v.active = False
        self.terminal_loops.append(list(loop))

    def dump(self) -> dict:
        """Diagnostic snapshot used by robustness-fault reports."""
        return {
            "t": self.t,
            "z": self.z,
            "loops": [
                [
                    {
                        "id": v.id,
                        "x": v.pos.x,
                        "y": v.pos.y,
                        "vx": v.vel.x,
                        "vy": v.vel.y,
                        "edge": f"{v.edge_key}.{v.frag}",
                        "alpha": v.alpha_prev,
                    }
                    for v in loop
                ]
                for loop in self.active_loops()
            ],
            "terminal": [[v.id for v in loop] for loop in self.terminal_loops],
        }


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------


def _ring_to_vecs(ring: Sequence[Sequence[float]], idx: int) -> list[Vec2]:
    if len(ring) < 3:
        raise WavefrontError(f"loop {idx} has fewer than 3 points")
    out = []
    for p in ring:
        x, y = float(p[0]), float(p[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise WavefrontError(f"loop {idx} contains a non-finite coordinate")
        out.append(Vec2(x, y))
    return out


def _validate_rings(rings: list[list[Vec2]], tol: Tolerances) -> None:
    for li, ring in enumerate(rings):
        n = len(ring)
        for i in range(n):
            if ring[i].dist(ring[(i + 1) % n]) <= tol.eps_geom:
                raise WavefrontError(f"loop {li} repeats consecutive points near index {i}")
        if abs(signed_area(ring)) <= tol.eps_geom:
            raise WavefrontError(f"loop {li} has no area")
    # proper self and mutual intersections
    segs: list[tuple[int, int, Vec2, Vec2]] = []
    for li, ring in enumerate(rings):
        n = len(ring)
        for i in range(n):
            segs.append((li, i, ring[i], ring[(i + 1) % n]))
    for a in range(len(segs)):
        la, ia, p1, p2 = segs[a]
        na = len(rings[la])
        for b in range(a + 1, len(segs)):
            lb, ib, q1, q2 = segs[b]
            if la == lb and (ib == (ia + 1) % na or ia == (ib + 1) % na):
                continue
            if segments_properly_intersect(p1, p2, q1, q2):
                raise WavefrontError(
                    f"edges cross: loop {la} edge {ia} against loop {lb} edge {ib}"
                )


def build_wavefront(
    loops: Sequence[Sequence[Sequence[float]]],
    alphas: Sequence[float],
    tol: Tolerances | None = None,
    start_times: Sequence[float] | None = None,
    normalize: bool = True,
) -> Wavefront:
    """Validate input rings and assemble the initial wavefront.

    ``alphas`` (and optional ``start_times``) are flat lists over all
    input edges, loop by loop, where edge ``k`` of a loop joins its
    point ``k`` to point ``k + 1``.  Ring orientation in the input is
    ignored: nesting parity decides which rings are holes, and rings
    are reoriented so that outer loops are CCW and holes CW.
    """
    tol = tol or Tolerances()
    if not loops:
        raise WavefrontError("no loops given")
    rings = [_ring_to_vecs(r, i) for i, r in enumerate(loops)]
    edge_total = sum(len(r) for r in rings)
    if len(alphas) != edge_total:
        raise WavefrontError(
            f"expected {edge_total} inclinations for {edge_total} edges, got {len(alphas)}"
        )
    starts = list(start_times) if start_times is not None else [0.0] * edge_total
    if len(starts) != edge_total:
        raise WavefrontError(f"expected {edge_total} start times, got {len(starts)}")
    if any(s < 0.0 or not math.isfinite(s) for s in starts):
        raise WavefrontError("start times must be finite and non-negative")

    if normalize:
        try:
            frame = NormFrame.from_points(p for r in rings for p in r)
        except ValueError as exc:
            raise WavefrontError(str(exc)) from exc
    else:
        frame = NormFrame(offset=Vec2(0.0, 0.0), scale=1.0)
    rings = [[frame.to_norm(p) for p in r] for r in rings]
    starts = [s * frame.scale for s in starts]  # world time -> normalized time
    _validate_rings(rings, tol)

    # nesting parity: a ring contained in an odd number of others is a hole
    hole = []
    for i, ring in enumerate(rings):
        depth = sum(
            1 for j, other in enumerate(rings) if j != i and polygon_contains(other, ring[0])
        )
        hole.append(depth % 2 == 1)

    w = Wavefront(tol, frame)
    w.edge_count = edge_total
    offset = 0
    for li, ring in enumerate(rings):
        m = len(ring)
        ccw = signed_area(ring) > 0.0
        flip = ccw == hole[li]
        verts: list[WavefrontVertex] = []
        for i in range(m):
            if flip:
                pos = ring[m - 1 - i]
                prev_pos = ring[(m - i) % m]
                key = offset + (m - 1 - i)
            else:
                pos = ring[i]
                prev_pos = ring[(i - 1) % m]
                key = offset + (i - 1) % m
            u = (pos - prev_pos).normalized()
            verts.append(
                w.new_vertex(
                    pos,
                    u_prev=u,
                    n_prev=u.perp_right(),
                    alpha_prev=clamp_alpha(alphas[key]),
                    edge_key=key,
                    start_prev=starts[key],
                )
            )
        for i in range(m):
            verts[i].next = verts[(i + 1) % m]
            verts[i].prev = verts[(i - 1) % m]
        offset += m
    return w


# ---------------------------------------------------------------------------
# surgery
# ---------------------------------------------------------------------------


def collapse_edge(
    w: Wavefront, v: WavefrontVertex, observer: WavefrontObserver = NULL_OBSERVER
) -> WavefrontVertex:
    """Remove the zero-length edge arriving at ``v``.

    The survivor is ``v.prev``, whose own incoming edge did not
    collapse; ``v`` is deleted and the survivor takes over its outgoing
    link.  Refuses to shrink a loop that is already terminal-sized.
    """
    if not v.active:
        raise SurgeryError(f"vertex {v.id} is not active")
    b = v.prev
    if b is v or v.next is v:
        raise SurgeryError("cannot collapse a self-loop")
    if v.pos.dist(b.pos) > 10.0 * w.tol.eps_geom:
        raise SurgeryError(
            f"edge into vertex {v.id} has length {v.pos.dist(b.pos):.3e}, not collapsed"
        )
    if len(w.loop_of(v)) < 3:
        raise SurgeryError("loop is terminal-sized; nothing left to collapse")
    observer.arc_end(v, "collapse", (v.edge_key, v.next.edge_key))
    observer.arc_end(b, "collapse", (b.edge_key, v.edge_key))
    b.next = v.next
    v.next.prev = b
    v.active = False
    b.collapse_origin = True
    observer.arc_start(b, "collapse")
    return b


def split_vertex_in_edge(
    w: Wavefront,
    p: WavefrontVertex,
    e_head: WavefrontVertex,
    observer: WavefrontObserver = NULL_OBSERVER,
) -> tuple[WavefrontVertex, WavefrontVertex]:
    """Split the edge ending at ``e_head`` at the penetrating vertex ``p``.

    Both fragments keep the parent edge identity (with fresh fragment
    numbers).  Within one loop this cuts it in two; across two loops it
    merges them, which is how holes join the outer front.  Returns the
    two vertices now sitting at the split point, each in its own chain.
    """
    t_vert = e_head.prev
    if e_head is p or e_head is p.next or t_vert is p:
        raise SurgeryError("cannot split an edge incident to the penetrating vertex")
    if not (p.active and e_head.active):
        raise SurgeryError("split participants must be active")

    observer.arc_end(p, "split", (p.edge_key, p.next.edge_key))
    y = p.next
    mate = w.new_vertex(
        p.pos,
        u_prev=e_head.u_prev,
        n_prev=e_head.n_prev,
        alpha_prev=e_head.alpha_prev,
        edge_key=e_head.edge_key,
        frag=w.next_fragment(e_head.edge_key),
        start_prev=e_head.start_prev,
    )
    e_head.frag = w.next_fragment(e_head.edge_key)
    # chain 1: ... t_vert -> mate -> y ...   chain 2: ... p -> e_head ...
    t_vert.next = mate
    mate.prev = t_vert
    mate.next = y
    y.prev = mate
    p.next = e_head
    e_head.prev = p
    p.split_origin = True
    mate.split_origin = True
    observer.arc_start(mate, "split")
    observer.arc_start(p, "split")
    return p, mate


def merge_vertex_on_vertex(
    w: Wavefront,
    p: WavefrontVertex,
    q: WavefrontVertex,
    observer: WavefrontObserver = NULL_OBSERVER,
) -> None:
    """Exchange next-links between two coincident vertices.

    The classic figure-eight cut: within one loop it pinches the loop
    into two, across loops it merges them.  Both vertices survive, each
    continuing into the other's old chain.
    """
    if p is q:
        raise SurgeryError("cannot merge a vertex with itself")
    if not (p.active and q.active):
        raise SurgeryError("merge participants must be active")
    if p.next is q or q.next is p:
        raise SurgeryError("adjacent vertices collapse, they do not merge")
    if p.pos.dist(q.pos) > 10.0 * w.tol.eps_geom:
        raise SurgeryError(f"vertices {p.id} and {q.id} do not coincide")
    observer.arc_end(p, "split", (p.edge_key, p.next.edge_key))
    observer.arc_end(q, "split", (q.edge_key, q.next.edge_key))
    p.next, q.next = q.next, p.next
    p.next.prev = p
    q.next.prev = q
    p.split_origin = True
    q.split_origin = True
    observer.arc_start(p, "split")
    observer.arc_start(q, "split")


def resolve_meet(
    w: Wavefront,
    cluster: Sequence[WavefrontVertex],
    observer: WavefrontObserver = NULL_OBSERVER,
) -> bool:
    """Re-pair the chains running through a point where vertices meet.

    For two vertices this is exactly :func:`merge_vertex_on_vertex`.
    For larger simultaneous meets the chains are re-paired by the
    non-crossing rule: sort the incident edge rays around the meet
    point, then join every arriving chain to the departing chain whose
    ray follows next counterclockwise.  This realises one particular
    order of pairwise exchanges, chosen so the resulting loops bound
    disjoint sectors.  Returns True when any link changed.
    """
    verts = [v for v in cluster if v.active]
    if len(verts) < 2:
        return False
    if len(verts) == 2:
        merge_vertex_on_vertex(w, verts[0], verts[1], observer)
        return True

    # rays from the meet point: "in" looks back along the arriving edge,
    # "out" looks forward along the departing edge
    # At exactly coincident ray angles (two chains sharing a corridor,
    # e.g. ridge loops) the departing ray must sort first so it pairs
    # with the arriving chain of the same corridor instead of crossing.
    OUT, IN = 0, 1
    rays: list[tuple[float, int, int, WavefrontVertex]] = []
    for v in verts:
        in_dir = Vec2(-v.u_prev.x, -v.u_prev.y)
        out_dir = v.next.u_prev
        rays.append((math.atan2(in_dir.y, in_dir.x), IN, v.id, v))
        rays.append((math.atan2(out_dir.y, out_dir.x), OUT, v.id, v))
    rays.sort(key=lambda r: (r[0], r[1], r[2]))

    items: list[tuple[int, WavefrontVertex]] = [(k, v) for _, k, _, v in rays]
    old_next = {v.id: v.next for v in verts}
    pairing: dict[int, WavefrontVertex] = {}
    guard = 0
    while items:
        guard += 1
        if guard > 4 * len(verts) + 8:
            raise SurgeryError("meet resolution failed to pair chains")
        n = len(items)
        for i in range(n):
            kind_a, v_out = items[i]
            kind_b, v_in = items[(i + 1) % n]
            if kind_a == OUT and kind_b == IN:
                pairing[v_in.id] = v_out
                del items[max(i, (i + 1) % n)]
                del items[min(i, (i + 1) % n)]
                break
        else:  # pragma: no cover - unreachable for balanced rays
            raise SurgeryError("meet resolution found no adjacent chain pair")

    changed = [v for v in verts if pairing[v.id] is not v]
    if not changed:
        return False
    for v in changed:
        observer.arc_end(v, "split", (v.edge_key, v.next.edge_key))
    for v in changed:
        v.next = old_next[pairing[v.id].id]
        v.next.prev = v
        v.split_origin = True
    for v in changed:
        observer.arc_start(v, "split")
    return True


def remove_colinear_vertices(
    w: Wavefront,
    marked: Iterable[WavefrontVertex],
    observer: WavefrontObserver = NULL_OBSERVER,
) -> list[WavefrontVertex]:
    """Remove vertices whose incident roof planes are linearly dependent.

    The surviving merged edge keeps the identity and inclination of the
    edge after the removed vertex, closing the consumed edge's face
    along its final position.  Manually inserted vertices whose two
    planes are still literally identical are left in place so that an
    interactive edit can change one side afterwards.
    """
    removed: list[WavefrontVertex] = []
    for v in sorted(marked, key=lambda u: u.id):
        if not v.active or not v.colinear:
            continue
        if v.manual and _planes_identical(v):
            continue
        if len(w.loop_of(v)) < 3:
            continue  # terminal-sized loop; handled by the step driver
        b = v.prev
        a = v.next
        observer.arc_end(v, "colinear", (v.edge_key, a.edge_key))
        observer.arc_end(b, "turn", (b.edge_key, v.edge_key))
        observer.face_closure(v.edge_key, a.edge_key, v.pos, b.pos)
        b.next = a
        a.prev = b
        v.active = False
        observer.arc_start(b, "turn")
        removed.append(v)
    return removed


def _planes_identical(v: WavefrontVertex) -> bool:
    a = v.next
    return (
        v.n_prev.dist(a.n_prev) <= 1e-12
        and abs(v.alpha_prev - a.alpha_prev) <= 1e-12
        and abs(v.start_prev - a.start_prev) <= 1e-12
    )


def insert_vertex_manual(
    w: Wavefront,
    e_head: WavefrontVertex,
    point: Vec2,
    observer: WavefrontObserver = NULL_OBSERVER,
) -> WavefrontVertex:
    """Insert an interactive vertex on the edge arriving at ``e_head``.

    The point is projected onto the edge and kept away from the
    endpoints; both halves keep the parent edge's plane, so the new
    vertex starts out colinear.  It carries the manual flag, which
    shields it from automatic removal until an edit makes its two
    sides differ.
    """
    if not e_head.active:
        raise SurgeryError("cannot insert on an edge of an inactive loop")
    a = e_head.prev
    u = e_head.u_prev
    length = (e_head.pos - a.pos).dot(u)
    margin = max(10.0 * w.tol.eps_geom, 1e-6 * length)
    if length <= 3.0 * margin:
        raise SurgeryError("edge is too short for a vertex insertion")
    tau = min(max((point - a.pos).dot(u), margin), length - margin)
    v = w.new_vertex(
        Vec2(a.pos.x + u.x * tau, a.pos.y + u.y * tau),
        u_prev=u,
        n_prev=e_head.n_prev,
        alpha_prev=e_head.alpha_prev,
        edge_key=e_head.edge_key,
        frag=w.next_fragment(e_head.edge_key),
        start_prev=e_head.start_prev,
    )
    e_head.frag = w.next_fragment(e_head.edge_key)
    v.manual = True
    a.next = v
    v.prev = a
    v.next = e_head
    e_head.prev = v
    observer.arc_start(v, "turn")
    return v


def remove_vertex_manual(
    w: Wavefront,
    v: WavefrontVertex,
    observer: WavefrontObserver = NULL_OBSERVER,
) -> None:
    """Interactively delete a vertex, merging its edges into the next one.

    Mirrors colinear removal — the surviving edge keeps the identity and
    inclination of the edge after the removed vertex — but the merged
    edge is re-aimed at the actual surviving endpoints, since a manual
    removal genuinely changes the shape.
    """
    if not v.active:
        raise SurgeryError(f"vertex {v.id} is not active")
    if len(w.loop_of(v)) <= 3:
        raise SurgeryError("a loop needs at least three vertices")
    b = v.prev
    a = v.next
    observer.arc_end(v, "turn", (v.edge_key, a.edge_key))
    observer.arc_end(b, "turn", (b.edge_key, v.edge_key))
    observer.face_closure(v.edge_key, a.edge_key, v.pos, b.pos)
    b.next = a
    a.prev = b
    v.active = False
    if a.pos.dist(b.pos) > w.tol.eps_geom:
        a.u_prev = (a.pos - b.pos).normalized()
        a.n_prev = a.u_prev.perp_right()
    observer.arc_start(b, "turn")

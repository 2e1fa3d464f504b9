"""Skeleton accumulation, roof faces, height schedule and mesh.

The builder listens to wavefront surgery.  Every vertex drags an open
arc behind it from the node where its current straight run began; the
arc is closed into the graph whenever the vertex dies, turns, or the
run terminates.  Nodes are deduplicated by position and height, so
simultaneous events at one location share a single node.  Each closed
arc also registers as a boundary segment of the two roof faces it
separates, keyed by input edge, and faces are assembled afterwards by
walking those segments into closed loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .geom import NormFrame, Tolerances, Vec2, Vec3, signed_area
from .wavefront import Wavefront, WavefrontObserver, WavefrontVertex

__all__ = [
    "NODE_KINDS",
    "SkeletonNode",
    "SkeletonArc",
    "FaceLoop",
    "SkeletonGraph",
    "SkeletonBuilder",
    "HeightSchedule",
    "build_faces",
    "build_roof_mesh",
]

# "turn" marks velocity discontinuities that are not classical events:
# slope jumps after colinear removal, interactive edits, schedule bands.
# "front" only appears in exports taken before the run has terminated.
NODE_KINDS = ("input", "collapse", "split", "colinear", "terminal", "turn", "front")


@dataclass
class SkeletonNode:
    id: int
    pos: Vec2
    z: float
    kind: str


@dataclass(frozen=True)
class SkeletonArc:
    a: int
    b: int
    vertex: int


@dataclass
class FaceLoop:
    edge: int
    nodes: list[int]


@dataclass
class SkeletonGraph:
    nodes: list[SkeletonNode]
    arcs: list[SkeletonArc]
    faces: list[FaceLoop] = field(default_factory=list)

    def node_by_id(self, nid: int) -> SkeletonNode:
        return self.nodes[nid]

    def interior_nodes(self) -> list[SkeletonNode]:
        return [n for n in self.nodes if n.kind != "input"]

    def to_world(self, frame: NormFrame) -> "SkeletonGraph":
        """Copy with node positions mapped out of the normalized frame."""
        nodes = [
            SkeletonNode(n.id, frame.to_world(n.pos), frame.z_to_world(n.z), n.kind)
            for n in self.nodes
        ]
        return SkeletonGraph(nodes, list(self.arcs), [FaceLoop(f.edge, list(f.nodes)) for f in self.faces])


class MalformedTrace(RuntimeError):
    """A face boundary did not close into a single loop."""


@dataclass
class _OpenArc:
    origin_node: int
    origin_pos: Vec2
    origin_z: float


class SkeletonBuilder(WavefrontObserver):
    """Observer that grows the skeleton graph while the wavefront runs."""

    def __init__(self, w: Wavefront) -> None:
        self.w = w
        self.tol = w.tol
        self.nodes: list[SkeletonNode] = []
        self.arcs: list[SkeletonArc] = []
        self.face_segments: dict[int, list[tuple[int, int]]] = {}
        self.face_input: dict[int, tuple[int, int]] = {}
        self.open_arcs: dict[int, _OpenArc] = {}
        self.snapshots: list[dict] = []
        self._cells: dict[tuple[int, int, int], list[int]] = {}
        self._cell = 64.0 * max(self.tol.eps_geom, 1e-12)
        self._begin()

    # -- node bookkeeping ---------------------------------------------------

    def _cell_key(self, pos: Vec2, z: float) -> tuple[int, int, int]:
        h = self._cell
        return (int(math.floor(pos.x / h)), int(math.floor(pos.y / h)), int(math.floor(z / h)))

    def ensure_node(self, pos: Vec2, z: float, kind: str) -> int:
        eps = self.tol.eps_geom
        cx, cy, cz = self._cell_key(pos, z)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for nid in self._cells.get((cx + dx, cy + dy, cz + dz), ()):
                        n = self.nodes[nid]
                        if n.pos.dist(pos) <= eps and abs(n.z - z) <= eps:
                            return nid
        nid = len(self.nodes)
        self.nodes.append(SkeletonNode(nid, pos, z, kind))
        self._cells.setdefault((cx, cy, cz), []).append(nid)
        return nid

    def _add_face_segment(self, face: int, seg: tuple[int, int]) -> None:
        if seg[0] == seg[1]:
            return
        self.face_segments.setdefault(face, []).append(seg)

    # -- observer protocol ----------------------------------------------------

    def _begin(self) -> None:
        for loop in self.w.active_loops():
            for v in loop:
                nid = self.ensure_node(v.pos, self.w.z, "input")
                self.open_arcs[v.id] = _OpenArc(nid, v.pos, self.w.z)
        for loop in self.w.active_loops():
            for v in loop:
                a = self.ensure_node(v.prev.pos, self.w.z, "input")
                b = self.ensure_node(v.pos, self.w.z, "input")
                self.face_input[v.edge_key] = (a, b)
                self._add_face_segment(v.edge_key, (a, b))

    def arc_start(self, v: WavefrontVertex, kind: str = "turn") -> None:
        nid = self.ensure_node(v.pos, self.w.z, kind)
        self.open_arcs[v.id] = _OpenArc(nid, v.pos, self.w.z)

    def arc_end(self, v: WavefrontVertex, kind: str, faces: tuple[int, int]) -> None:
        nid = self.ensure_node(v.pos, self.w.z, kind)
        arc = self.open_arcs.pop(v.id, None)
        if arc is None or arc.origin_node == nid:
            return
        self.arcs.append(SkeletonArc(arc.origin_node, nid, v.id))
        if faces[0] != faces[1]:
            self._add_face_segment(faces[0], (arc.origin_node, nid))
            self._add_face_segment(faces[1], (arc.origin_node, nid))

    def face_closure(self, face_a: int, face_b: int, p_a: Vec2, p_b: Vec2) -> None:
        a = self.ensure_node(p_a, self.w.z, "turn")
        b = self.ensure_node(p_b, self.w.z, "turn")
        if a == b or face_a == face_b:
            return
        self._add_face_segment(face_a, (a, b))
        self._add_face_segment(face_b, (a, b))

    def turn(self, v: WavefrontVertex) -> None:
        arc = self.open_arcs.get(v.id)
        if arc is None or arc.origin_pos.dist(v.pos) <= self.tol.eps_geom:
            return
        self.arc_end(v, "turn", (v.edge_key, v.next.edge_key))
        self.arc_start(v, "turn")

    def terminal_loop(self, loop: Sequence[WavefrontVertex]) -> None:
        for v in loop:
            self.arc_end(v, "terminal", (v.edge_key, v.next.edge_key))
        if len(loop) == 2:
            a, b = loop
            if a.pos.dist(b.pos) > self.tol.eps_geom:
                na = self.ensure_node(a.pos, self.w.z, "terminal")
                nb = self.ensure_node(b.pos, self.w.z, "terminal")
                self.arcs.append(SkeletonArc(na, nb, min(a.id, b.id)))
                self._add_face_segment(a.edge_key, (na, nb))
                self._add_face_segment(b.edge_key, (na, nb))

    def record_snapshot(self, w: Wavefront, events: Sequence[object]) -> None:
        self.snapshots.append(
            {
                "t": w.t,
                "z": w.z,
                "loops": [
                    {"ids": [v.id for v in loop], "points": [v.pos for v in loop]}
                    for loop in w.active_loops()
                ],
                "events": len(events),
            }
        )

    # -- extraction -------------------------------------------------------------

    def graph(self, include_open: bool = True, strict_faces: bool | None = None) -> SkeletonGraph:
        """Snapshot of the skeleton accumulated so far.

        Open arcs of still-moving vertices are reported as provisional
        arcs ending in "front" nodes; a terminated run has none.  Faces
        are checked for closure strictly on terminated runs; before
        termination still-open faces are silently omitted (pass
        ``strict_faces`` to override either way).
        """
        if strict_faces is None:
            strict_faces = self.w.is_terminated()
        nodes = [SkeletonNode(n.id, n.pos, n.z, n.kind) for n in self.nodes]
        arcs = list(self.arcs)
        if include_open:
            extra: dict[tuple[int, int, int], int] = {}
            for vid, arc in sorted(self.open_arcs.items()):
                v = self.w.vertices.get(vid)
                if v is None or not v.active:
                    continue
                if arc.origin_pos.dist(v.pos) <= self.tol.eps_geom:
                    continue
                key = self._cell_key(v.pos, self.w.z)
                nid = extra.get(key, -1)
                if nid < 0 or nodes[nid].pos.dist(v.pos) > self.tol.eps_geom:
                    nid = len(nodes)
                    nodes.append(SkeletonNode(nid, v.pos, self.w.z, "front"))
                    extra[key] = nid
                arcs.append(SkeletonArc(arc.origin_node, nid, vid))
        g = SkeletonGraph(nodes=nodes, arcs=arcs)
        g.faces = build_faces(self, nodes, strict=strict_faces)
        return g


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------


def build_faces(
    builder: SkeletonBuilder, nodes: list[SkeletonNode], strict: bool = True
) -> list[FaceLoop]:
    """Order each face's boundary segments into a closed node loop.

    The walk starts along the input edge and keeps the face interior on
    its left; at a node visited more than once by the same face the
    outgoing segment making the sharpest clockwise turn from the
    reversed incoming direction is taken.  Raises
    :class:`MalformedTrace` when a boundary cannot be closed, unless
    ``strict`` is off, in which case the unfinished face is skipped
    (mid-run exports use this).
    """
    faces: list[FaceLoop] = []
    for key in sorted(builder.face_segments):
        try:
            face = _walk_face(builder, nodes, key)
        except MalformedTrace:
            if strict:
                raise
            continue
        if face is not None:
            faces.append(face)
    return faces


def _walk_face(
    builder: SkeletonBuilder, nodes: list[SkeletonNode], key: int
) -> FaceLoop | None:
    segs = builder.face_segments[key]
    start = builder.face_input.get(key)
    if start is None:
        return None
    adj: dict[int, list[tuple[int, int]]] = {}
    for idx, (a, b) in enumerate(segs):
        adj.setdefault(a, []).append((b, idx))
        adj.setdefault(b, []).append((a, idx))
    used = [False] * len(segs)
    tail, head = start
    for other, idx in adj.get(tail, ()):
        if other == head and not used[idx]:
            used[idx] = True
            break
    else:  # pragma: no cover - the input segment is always registered
        raise MalformedTrace(f"face {key} lost its input edge")
    loop = [tail, head]
    prev_node, cur = tail, head
    for _ in range(4 * len(segs) + 4):
        if cur == tail:
            break
        options = [(other, idx) for other, idx in adj.get(cur, ()) if not used[idx]]
        if not options:
            raise MalformedTrace(f"face {key} is open at node {cur}")
        if len(options) == 1:
            nxt, idx = options[0]
        else:
            d_in = nodes[cur].pos - nodes[prev_node].pos
            back = math.atan2(-d_in.y, -d_in.x)
            best = None
            for other, idx2 in options:
                d_out = nodes[other].pos - nodes[cur].pos
                ang = math.atan2(d_out.y, d_out.x)
                cw = (back - ang) % (2.0 * math.pi)
                if cw <= 1e-12:
                    cw += 2.0 * math.pi
                if best is None or cw < best[0]:
                    best = (cw, other, idx2)
            assert best is not None
            _, nxt, idx = best
        used[idx] = True
        prev_node = cur
        cur = nxt
        if cur != tail:
            loop.append(cur)
    else:
        raise MalformedTrace(f"face {key} walk did not terminate")
    if any(not u for u in used):
        raise MalformedTrace(f"face {key} has {used.count(False)} unreachable segments")
    return FaceLoop(edge=key, nodes=loop)


def face_plan_area(graph: SkeletonGraph, face: FaceLoop) -> float:
    return abs(signed_area([graph.nodes[nid].pos for nid in face.nodes]))


# ---------------------------------------------------------------------------
# height schedule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightSchedule:
    """Piecewise-constant vertical rate: ``rate(z)`` holds from each
    breakpoint height up to the next one."""

    breakpoints: tuple[tuple[float, float], ...] = ((0.0, 1.0),)

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise ValueError("schedule needs at least one breakpoint")
        prev = None
        for z, vz in self.breakpoints:
            if not (math.isfinite(z) and math.isfinite(vz)):
                raise ValueError("schedule entries must be finite")
            if vz <= 0.0:
                raise ValueError("vertical rate must be positive")
            if prev is not None and z <= prev:
                raise ValueError("schedule breakpoints must increase strictly")
            prev = z
        if self.breakpoints[0][0] != 0.0:
            raise ValueError("schedule must start at height 0")

    @staticmethod
    def from_pairs(pairs: Sequence[Sequence[float]] | None) -> "HeightSchedule":
        if not pairs:
            return HeightSchedule()
        return HeightSchedule(tuple((float(z), float(vz)) for z, vz in pairs))

    def rate(self, z: float) -> float:
        out = self.breakpoints[0][1]
        for bz, vz in self.breakpoints:
            if z >= bz - 1e-15:
                out = vz
            else:
                break
        return out

    def next_boundary(self, z: float) -> float | None:
        for bz, _ in self.breakpoints:
            if bz > z + 1e-15:
                return bz
        return None

    def scaled(self, s: float) -> "HeightSchedule":
        """Schedule with all breakpoint heights multiplied by ``s``."""
        return HeightSchedule(tuple((z * s, vz) for z, vz in self.breakpoints))


# ---------------------------------------------------------------------------
# roof mesh
# ---------------------------------------------------------------------------


@dataclass
class RoofMesh:
    vertices: list[Vec3]
    triangles: list[tuple[int, int, int]]
    triangle_faces: list[int]


def _newell_normal(pts: list[Vec3]) -> Vec3:
    nx = ny = nz = 0.0
    n = len(pts)
    for i in range(n):
        p = pts[i]
        q = pts[(i + 1) % n]
        nx += (p.y - q.y) * (p.z + q.z)
        ny += (p.z - q.z) * (p.x + q.x)
        nz += (p.x - q.x) * (p.y + q.y)
    return Vec3(nx, ny, nz)


def _ear_clip(pts2: list[Vec2]) -> list[tuple[int, int, int]]:
    n = len(pts2)
    if n < 3:
        return []
    idx = list(range(n))
    area = signed_area(pts2)
    if area < 0.0:
        idx.reverse()
    tris: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3 and guard < 4 * n * n:
        guard += 1
        clipped = False
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = pts2[i0], pts2[i1], pts2[i2]
            if (b - a).cross(c - b) <= 1e-18:
                continue
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = pts2[j]
                if (
                    (b - a).cross(p - a) >= -1e-18
                    and (c - b).cross(p - b) >= -1e-18
                    and (a - c).cross(p - c) >= -1e-18
                ):
                    ok = False
                    break
            if ok:
                tris.append((i0, i1, i2))
                del idx[k]
                clipped = True
                break
        if not clipped:
            # fall back on a fan from the first remaining corner; only
            # degenerate (zero-area) remainders reach this point
            for k in range(1, len(idx) - 1):
                tris.append((idx[0], idx[k], idx[k + 1]))
            idx = idx[:3]
            break
    if len(idx) == 3:
        tris.append((idx[0], idx[1], idx[2]))
    return tris


def build_roof_mesh(graph: SkeletonGraph) -> RoofMesh:
    """Triangulate every face loop in 3D via its best-fit plane."""
    verts: list[Vec3] = []
    vert_id: dict[int, int] = {}

    def vid(nid: int) -> int:
        if nid not in vert_id:
            n = graph.nodes[nid]
            vert_id[nid] = len(verts)
            verts.append(Vec3(n.pos.x, n.pos.y, n.z))
        return vert_id[nid]

    tris: list[tuple[int, int, int]] = []
    tri_faces: list[int] = []
    for face in graph.faces:
        pts = [Vec3(graph.nodes[n].pos.x, graph.nodes[n].pos.y, graph.nodes[n].z) for n in face.nodes]
        normal = _newell_normal(pts)
        nn = normal.norm()
        if nn <= 1e-18:
            continue
        normal = normal.scaled(1.0 / nn)
        ref = Vec3(0.0, 0.0, 1.0) if abs(normal.z) < 0.9 else Vec3(1.0, 0.0, 0.0)
        u = normal.cross(ref)
        u = u.scaled(1.0 / u.norm())
        v = normal.cross(u)
        flat = [Vec2(p.dot(u), p.dot(v)) for p in pts]
        for i0, i1, i2 in _ear_clip(flat):
            tris.append((vid(face.nodes[i0]), vid(face.nodes[i1]), vid(face.nodes[i2])))
            tri_faces.append(face.edge)
    return RoofMesh(vertices=verts, triangles=tris, triangle_faces=tri_faces)

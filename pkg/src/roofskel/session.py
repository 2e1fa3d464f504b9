"""Resumable runs: stepping, live edits, journaling and undo.

A session owns one wavefront built from a parsed document and exposes
everything in world units.  Every mutating call is appended to a
journal after it succeeds; undo rebuilds the session from the original
document and replays the journal minus its last entry, which is what
makes undo byte-exact.  A step request advances by at most the given
height and stops early at the first event batch, so a client asking
for a large step pauses exactly at events.

``run_batch`` drives a session to termination (or a height bound) and
is what the command line wraps.
"""

from __future__ import annotations

import threading
import uuid
from typing import Any

from .document import PolygonDocument
from .geom import Vec2
from .kinetics import KineticEvent, RobustnessFault, settle, step
from .outputs import roof_obj, skeleton_json, wavefront_svg
from .skeleton import HeightSchedule, SkeletonBuilder, build_roof_mesh
from .velocity import clamp_alpha
from .wavefront import (
    SurgeryError,
    build_wavefront,
    insert_vertex_manual,
    remove_vertex_manual,
)

__all__ = [
    "EditError",
    "SessionConflict",
    "Session",
    "SessionManager",
    "run_batch",
]

#: cap on one increment's normalized travel; keeps predictor arithmetic
#: well-conditioned when a client requests an effectively unbounded step
MAX_TRAVEL = 16.0

EDIT_OPS = ("set_alpha", "insert_vertex", "remove_vertex", "set_schedule")


class EditError(ValueError):
    """An edit request that cannot be applied to the current state."""


class SessionConflict(RuntimeError):
    """A mutating request against a terminated or faulted session."""


class Session:
    """One interactive run; all public values are in world units."""

    def __init__(self, doc: PolygonDocument, session_id: str | None = None) -> None:
        self.id = session_id or uuid.uuid4().hex[:12]
        self.doc = doc
        self.journal: list[dict[str, Any]] = []
        self.lock = threading.Lock()
        self._reset()

    def _reset(self) -> None:
        self.w = build_wavefront(
            self.doc.loops,
            self.doc.alphas(),
            start_times=self.doc.start_times or None,
        )
        self.frame = self.w.frame
        self.schedule = HeightSchedule.from_pairs(self.doc.schedule).scaled(self.frame.scale)
        self.builder = SkeletonBuilder(self.w)
        self.status = "running"
        self.fault: dict | None = None
        self.events: list[dict[str, Any]] = []
        settle(self.w, self.builder)
        if self.w.is_terminated():
            self.status = "terminated"

    # -- stepping -------------------------------------------------------------

    def _next_start_boundary(self) -> float | None:
        pending = [
            v.start_prev
            for v in self.w.active_vertices()
            if v.start_prev > self.w.t + 1e-12
        ]
        return min(pending) if pending else None

    def _dt_cap(self) -> float:
        vmax = max((v.vel.norm() for v in self.w.active_vertices()), default=0.0)
        return MAX_TRAVEL / max(vmax, 1e-9)

    def _advance(self, dz_world: float) -> dict[str, Any]:
        """One step request: consume height until done or an event fires."""
        applied: list[KineticEvent] = []
        advanced_n = 0.0
        remaining = dz_world * self.frame.scale
        guard = 0
        while remaining > 1e-15 and not self.w.is_terminated():
            guard += 1
            if guard > 100000:
                raise RobustnessFault("step request did not converge", self.w.dump())
            vz = self.schedule.rate(self.w.z)
            dt = remaining / vz
            boundary = self.schedule.next_boundary(self.w.z)
            if boundary is not None:
                dt = min(dt, (boundary - self.w.z) / vz)
            start = self._next_start_boundary()
            if start is not None:
                dt = min(dt, start - self.w.t)
            dt = min(dt, self._dt_cap())
            res = step(self.w, dt, vz, self.builder)
            advanced_n += res.advanced_dz
            remaining -= res.advanced_dz
            applied.extend(res.events)
            if res.status == "terminated" or res.events:
                break
        self.status = "terminated" if self.w.is_terminated() else "running"
        event_views = [self._event_view(e) for e in applied]
        self.events.extend(event_views)
        return {
            "advanced_dz": self.frame.z_to_world(advanced_n),
            "events": event_views,
            "status": self.status,
            "z": self.frame.z_to_world(self.w.z),
        }

    def step(self, dz_world: float) -> dict[str, Any]:
        if self.status == "faulted":
            raise SessionConflict("session has faulted; only export and undo remain")
        if not (dz_world > 0.0):
            raise EditError("step height must be positive")
        if self.status == "terminated":
            return {
                "advanced_dz": 0.0,
                "events": [],
                "status": self.status,
                "z": self.frame.z_to_world(self.w.z),
            }
        try:
            result = self._advance(dz_world)
        except RobustnessFault as fault:
            self.status = "faulted"
            self.fault = {"message": str(fault), "dump": fault.dump}
            return {
                "advanced_dz": 0.0,
                "events": [],
                "status": self.status,
                "z": self.frame.z_to_world(self.w.z),
                "fault": str(fault),
            }
        self.journal.append({"op": "step", "dz": dz_world})
        return result

    def _event_view(self, e: KineticEvent) -> dict[str, Any]:
        p = self.frame.to_world(e.loc)
        return {
            "kind": e.kind,
            "contact": e.contact,
            "t": self.frame.z_to_world(e.t_abs),
            "z": self.frame.z_to_world(e.z_abs),
            "x": p.x,
            "y": p.y,
        }

    # -- edits ----------------------------------------------------------------

    def edit(self, spec: dict[str, Any]) -> None:
        if self.status == "terminated":
            raise SessionConflict("cannot edit a terminated session")
        if self.status == "faulted":
            raise SessionConflict("cannot edit a faulted session")
        if not isinstance(spec, dict) or len(spec) != 1:
            raise EditError(f"an edit is one of {', '.join(EDIT_OPS)}")
        op, body = next(iter(spec.items()))
        if op not in EDIT_OPS:
            raise EditError(f"unknown edit {op!r}")
        getattr(self, f"_edit_{op}")(body)
        settle(self.w, self.builder)
        if self.w.is_terminated():
            self.status = "terminated"
        self.journal.append({"op": "edit", "spec": spec})

    def _edge_vertex(self, body: dict[str, Any]):
        loops = self.w.active_loops()
        try:
            li = int(body["loop"])
            ei = int(body["edge"])
        except (KeyError, TypeError, ValueError) as exc:
            raise EditError("edit needs integer loop and edge indices") from exc
        if not 0 <= li < len(loops):
            raise EditError(f"no active loop {li}")
        loop = loops[li]
        if not 0 <= ei < len(loop):
            raise EditError(f"loop {li} has no edge {ei}")
        # edge k of the serialized loop joins vertex k to k + 1 and is
        # stored on the vertex it arrives at
        return loop[(ei + 1) % len(loop)]

    def _edit_set_alpha(self, body: Any) -> None:
        if not isinstance(body, dict):
            raise EditError("set_alpha needs {loop, edge, alpha}")
        v = self._edge_vertex(body)
        try:
            alpha = clamp_alpha(float(body["alpha"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise EditError(f"bad inclination: {exc}") from exc
        v.alpha_prev = alpha
        v.manual = True

    def _edit_insert_vertex(self, body: Any) -> None:
        if not isinstance(body, dict):
            raise EditError("insert_vertex needs {loop, edge, point}")
        v = self._edge_vertex(body)
        point = body.get("point")
        if not isinstance(point, (list, tuple)) or len(point) != 2:
            raise EditError("insert_vertex needs point: [x, y]")
        p = self.frame.to_norm(Vec2(float(point[0]), float(point[1])))
        try:
            insert_vertex_manual(self.w, v, p, self.builder)
        except SurgeryError as exc:
            raise EditError(str(exc)) from exc

    def _edit_remove_vertex(self, body: Any) -> None:
        if not isinstance(body, dict) or "id" not in body:
            raise EditError("remove_vertex needs {id}")
        v = self.w.vertices.get(int(body["id"]))
        if v is None or not v.active:
            raise EditError(f"vertex id {body.get('id')} is stale or unknown")
        try:
            remove_vertex_manual(self.w, v, self.builder)
        except SurgeryError as exc:
            raise EditError(str(exc)) from exc

    def _edit_set_schedule(self, body: Any) -> None:
        if not isinstance(body, list):
            raise EditError("set_schedule needs a list of {z, vz} breakpoints")
        try:
            pairs = [(float(e["z"]), float(e["vz"])) for e in body]
            sched = HeightSchedule.from_pairs(pairs)
        except (KeyError, TypeError, ValueError) as exc:
            raise EditError(f"bad schedule: {exc}") from exc
        self.schedule = sched.scaled(self.frame.scale)

    # -- undo -----------------------------------------------------------------

    def undo(self) -> None:
        if not self.journal:
            raise EditError("nothing to undo")
        entries = self.journal[:-1]
        self.journal = []
        self._reset()
        for entry in entries:
            if entry["op"] == "step":
                self.step(entry["dz"])
            else:
                self.edit(entry["spec"])

    # -- views and exports -----------------------------------------------------

    def world_input_loops(self) -> list[list[Vec2]]:
        return [[Vec2(x, y) for x, y in ring] for ring in self.doc.loops]

    def world_snapshots(self) -> list[tuple[float, list[list[Vec2]]]]:
        out = []
        for snap in self.builder.snapshots:
            loops = [
                [self.frame.to_world(p) for p in entry["points"]]
                for entry in snap["loops"]
            ]
            out.append((self.frame.z_to_world(snap["z"]), loops))
        return out

    def world_graph(self):
        return self.builder.graph().to_world(self.frame)

    def state_view(self) -> dict[str, Any]:
        graph = self.world_graph()
        loops = []
        for loop in self.w.active_loops():
            m = len(loop)
            verts = []
            edges = []
            for i, v in enumerate(loop):
                p = self.frame.to_world(v.pos)
                verts.append({"id": v.id, "x": p.x, "y": p.y, "vx": v.vel.x, "vy": v.vel.y})
                head = loop[(i + 1) % m]
                edges.append(
                    {
                        "alpha": head.alpha_prev,
                        "active": head.effective_alpha(self.w.t) == head.alpha_prev,
                        "edge_key": head.edge_key,
                    }
                )
            loops.append({"vertices": verts, "edges": edges})
        terminal = [
            [
                {"id": v.id, "x": self.frame.to_world(v.pos).x, "y": self.frame.to_world(v.pos).y}
                for v in loop
            ]
            for loop in self.w.terminal_loops
        ]
        return {
            "id": self.id,
            "status": self.status,
            "z": self.frame.z_to_world(self.w.z),
            "t": self.frame.z_to_world(self.w.t),
            "input_loops": [[[x, y] for x, y in ring] for ring in self.doc.loops],
            "loops": loops,
            "terminal_loops": terminal,
            "skeleton": {
                "nodes": [
                    {"id": n.id, "x": n.pos.x, "y": n.pos.y, "z": n.z, "kind": n.kind}
                    for n in graph.nodes
                ],
                "arcs": [{"a": a.a, "b": a.b} for a in graph.arcs],
            },
            "snapshots": [
                {"z": z, "loops": [[[p.x, p.y] for p in ring] for ring in rings]}
                for z, rings in self.world_snapshots()
            ],
            "events": list(self.events),
            "journal_length": len(self.journal),
            "fault": self.fault["message"] if self.fault else None,
        }

    def export(self, fmt: str) -> bytes:
        graph = self.world_graph()
        if fmt == "json":
            return skeleton_json(graph, self.frame.z_to_world(self.w.z), self.status)
        if fmt == "svg":
            return wavefront_svg(self.world_input_loops(), self.world_snapshots(), graph)
        if fmt == "obj":
            return roof_obj(build_roof_mesh(graph))
        raise EditError(f"unknown export format {fmt!r}")


class SessionManager:
    """In-memory session registry; per-session work is serialized."""

    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, doc: PolygonDocument) -> Session:
        s = Session(doc)
        with self._lock:
            self._sessions[s.id] = s
        return s

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(session_id)
            return self._sessions[session_id]


def run_batch(doc: PolygonDocument, dz: float, max_z: float | None = None) -> Session:
    """Step a fresh session to termination or to ``max_z``.

    ``dz`` is the height granularity of the recorded offset snapshots.
    Inputs containing stationary or outward edges need a height bound,
    since such fronts may never terminate.
    """
    if dz <= 0.0:
        raise ValueError("step height must be positive")
    if max_z is None and doc.may_run_forever():
        raise ValueError(
            "input has stationary or outward edges; a maximum height is required"
        )
    s = Session(doc)
    while s.status == "running":
        room = dz if max_z is None else min(dz, max_z - s.frame.z_to_world(s.w.z))
        if room <= 1e-12:
            break
        s.step(room)
    return s

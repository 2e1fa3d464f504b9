"""Input documents: polygon loops plus per-edge motion attributes.

A document is UTF-8 JSON.  ``loops`` holds coordinate rings (edge ``k``
of a ring joins its point ``k`` to point ``k + 1``, wrapping); ``edges``
assigns each edge, in the same flat order, exactly one of an explicit
inclination ``alpha``, a ground-speed ``weight`` (converted to an
inclination at ingest) or a ``stationary`` flag.  The optional
``schedule`` lists vertical-rate breakpoints and ``start_times`` delays
individual edges, which stand still until their start time.

Parsing reports structured errors carrying the JSON path of the
offending element so a caller can point at the input.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .velocity import alpha_from_weight

__all__ = [
    "DocumentError",
    "EdgeSpec",
    "PolygonDocument",
    "parse_document",
    "serialize_document",
]


class DocumentError(ValueError):
    """A document failed validation; ``path`` locates the bad element."""

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


@dataclass(frozen=True)
class EdgeSpec:
    """Exactly one way of prescribing an edge's motion."""

    kind: str  # "alpha" | "weight" | "stationary"
    value: float | None = None

    def alpha(self) -> float:
        if self.kind == "alpha":
            assert self.value is not None
            return self.value
        if self.kind == "weight":
            assert self.value is not None
            return alpha_from_weight(self.value)
        return 0.5 * math.pi

    def to_json(self) -> dict[str, Any]:
        if self.kind == "stationary":
            return {"stationary": True}
        return {self.kind: self.value}


@dataclass
class PolygonDocument:
    loops: list[list[tuple[float, float]]]
    edges: list[EdgeSpec]
    schedule: list[tuple[float, float]] = field(default_factory=list)
    start_times: list[float] = field(default_factory=list)

    def edge_count(self) -> int:
        return sum(len(r) for r in self.loops)

    def alphas(self) -> list[float]:
        return [e.alpha() for e in self.edges]

    def may_run_forever(self) -> bool:
        """True when some edge is stationary or moves outward."""
        return any(e.alpha() >= 0.5 * math.pi - 1e-12 for e in self.edges)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "loops": [[[x, y] for x, y in ring] for ring in self.loops],
            "edges": [e.to_json() for e in self.edges],
        }
        if self.schedule:
            out["schedule"] = [{"z": z, "vz": vz} for z, vz in self.schedule]
        if self.start_times:
            out["start_times"] = list(self.start_times)
        return out


def _require_number(val: Any, path: str) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise DocumentError(path, f"expected a number, got {type(val).__name__}")
    out = float(val)
    if not math.isfinite(out):
        raise DocumentError(path, "must be finite")
    return out


def _parse_loops(raw: Any) -> list[list[tuple[float, float]]]:
    if not isinstance(raw, list) or not raw:
        raise DocumentError("loops", "expected a non-empty list of rings")
    loops: list[list[tuple[float, float]]] = []
    for li, ring in enumerate(raw):
        if not isinstance(ring, list):
            raise DocumentError(f"loops[{li}]", "expected a list of points")
        if len(ring) < 3:
            raise DocumentError(f"loops[{li}]", "ring requires >=3 points")
        pts: list[tuple[float, float]] = []
        for pi, p in enumerate(ring):
            if not isinstance(p, list) or len(p) != 2:
                raise DocumentError(f"loops[{li}][{pi}]", "expected an [x, y] pair")
            pts.append(
                (
                    _require_number(p[0], f"loops[{li}][{pi}][0]"),
                    _require_number(p[1], f"loops[{li}][{pi}][1]"),
                )
            )
        loops.append(pts)
    return loops


def _parse_edge(raw: Any, path: str) -> EdgeSpec:
    if not isinstance(raw, dict):
        raise DocumentError(path, "expected an object")
    keys = set(raw) & {"alpha", "weight", "stationary"}
    if len(keys) != 1 or set(raw) != keys:
        raise DocumentError(path, "exactly one of alpha/weight/stationary required")
    key = keys.pop()
    if key == "stationary":
        if raw[key] is not True:
            raise DocumentError(f"{path}.stationary", "must be true when present")
        return EdgeSpec("stationary")
    value = _require_number(raw[key], f"{path}.{key}")
    if key == "alpha" and not (0.0 < value < math.pi):
        raise DocumentError(f"{path}.alpha", "must lie in (0, pi)")
    return EdgeSpec(key, value)


def parse_document(data: bytes | str) -> PolygonDocument:
    """Parse and validate a polygon document from JSON text."""
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DocumentError("$", "top level must be an object")
    unknown = set(raw) - {"loops", "edges", "schedule", "start_times"}
    if unknown:
        raise DocumentError("$", f"unknown fields: {', '.join(sorted(unknown))}")

    loops = _parse_loops(raw.get("loops"))
    edge_total = sum(len(r) for r in loops)

    raw_edges = raw.get("edges")
    if not isinstance(raw_edges, list):
        raise DocumentError("edges", "expected a list of edge attributes")
    if len(raw_edges) != edge_total:
        raise DocumentError(
            "edges", f"expected {edge_total} entries for {edge_total} edges, got {len(raw_edges)}"
        )
    edges = [_parse_edge(e, f"edges[{i}]") for i, e in enumerate(raw_edges)]

    schedule: list[tuple[float, float]] = []
    if "schedule" in raw:
        raw_sched = raw["schedule"]
        if not isinstance(raw_sched, list):
            raise DocumentError("schedule", "expected a list of breakpoints")
        prev_z = None
        for i, entry in enumerate(raw_sched):
            if not isinstance(entry, dict) or set(entry) != {"z", "vz"}:
                raise DocumentError(f"schedule[{i}]", "expected an object with z and vz")
            z = _require_number(entry["z"], f"schedule[{i}].z")
            vz = _require_number(entry["vz"], f"schedule[{i}].vz")
            if vz <= 0.0:
                raise DocumentError(f"schedule[{i}].vz", "vertical rate must be positive")
            if i == 0 and z != 0.0:
                raise DocumentError("schedule[0].z", "schedule must start at height 0")
            if prev_z is not None and z <= prev_z:
                raise DocumentError(f"schedule[{i}].z", "breakpoints must increase strictly")
            prev_z = z
            schedule.append((z, vz))

    start_times: list[float] = []
    if "start_times" in raw:
        raw_starts = raw["start_times"]
        if not isinstance(raw_starts, list):
            raise DocumentError("start_times", "expected a list of times")
        if len(raw_starts) != edge_total:
            raise DocumentError(
                "start_times", f"expected {edge_total} entries, got {len(raw_starts)}"
            )
        for i, s in enumerate(raw_starts):
            t0 = _require_number(s, f"start_times[{i}]")
            if t0 < 0.0:
                raise DocumentError(f"start_times[{i}]", "must be non-negative")
            start_times.append(t0)

    return PolygonDocument(loops=loops, edges=edges, schedule=schedule, start_times=start_times)


def serialize_document(doc: PolygonDocument) -> bytes:
    """Canonical JSON bytes; ``parse_document`` inverts this exactly."""
    return json.dumps(doc.to_json(), indent=2).encode("utf-8")

"""Export formats: skeleton JSON, layered SVG, roof OBJ, figure report.

JSON and OBJ are byte-deterministic: floats are printed with 17
significant digits and the element order follows the accumulation
order, so re-running the same steps reproduces identical files.  SVG is
deterministic too but carries styling, which is not part of any
contract.  All exporters take world-frame data.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .geom import Vec2
from .skeleton import RoofMesh, SkeletonGraph

__all__ = [
    "format_float",
    "skeleton_json",
    "wavefront_svg",
    "roof_obj",
    "write_report",
]

NODE_COLORS = {
    "input": "#000000",
    "collapse": "#cc2222",
    "split": "#2255cc",
    "colinear": "#dd8800",
    "terminal": "#229944",
    "turn": "#999999",
    "front": "#bbbbbb",
}

Snapshot = tuple[float, list[list[Vec2]]]


def format_float(x: float) -> str:
    """Fixed 17-significant-digit decimal form, with -0 normalized."""
    if x == 0.0:
        x = 0.0
    return format(x, ".17g")


def _emit(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:  # pragma: no cover - exporter misuse
        raise TypeError(f"cannot emit {type(obj).__name__}")


def dumps_fixed(obj) -> bytes:
    """Compact JSON with fixed float formatting (deterministic bytes)."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out).encode("utf-8")


def skeleton_json(graph: SkeletonGraph, z: float, status: str) -> bytes:
    doc = {
        "z": float(z),
        "status": status,
        "nodes": [
            {"id": n.id, "x": n.pos.x, "y": n.pos.y, "z": n.z, "kind": n.kind}
            for n in graph.nodes
        ],
        "arcs": [{"a": a.a, "b": a.b, "vertex": a.vertex} for a in graph.arcs],
        "faces": [{"edge": f.edge, "nodes": list(f.nodes)} for f in graph.faces],
    }
    return dumps_fixed(doc)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def _bounds(points: list[Vec2]) -> tuple[float, float, float, float]:
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def _path(ring: Sequence[Vec2]) -> str:
    cmds = [f"{'M' if i == 0 else 'L'} {p.x:.6g} {-p.y:.6g}" for i, p in enumerate(ring)]
    return " ".join(cmds) + " Z"


def wavefront_svg(
    input_loops: list[list[Vec2]],
    snapshots: list[Snapshot],
    graph: SkeletonGraph,
) -> bytes:
    """Layered drawing: input, offset snapshots, arcs, event nodes.

    The y axis is negated so the drawing appears in the usual
    mathematical orientation.
    """
    pts = [p for ring in input_loops for p in ring]
    pts += [n.pos for n in graph.nodes]
    for _, loops in snapshots:
        for ring in loops:
            pts += ring
    x0, y0, x1, y1 = _bounds(pts) if pts else (0.0, 0.0, 1.0, 1.0)
    extent = max(x1 - x0, y1 - y0, 1e-9)
    pad = 0.05 * extent
    stroke = 0.004 * extent
    node_r = 0.012 * extent

    parts: list[str] = []
    parts.append(
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0 - pad:.6g} {-(y1 + pad):.6g} {x1 - x0 + 2 * pad:.6g} {y1 - y0 + 2 * pad:.6g}">'
    )
    parts.append(f'<g fill="none" stroke-width="{stroke:.6g}">')

    parts.append('<g stroke="#3366aa" stroke-opacity="0.35">')
    for _, loops in snapshots:
        for ring in loops:
            if len(ring) >= 2:
                parts.append(f'<path d="{_path(ring)}"/>')
    parts.append("</g>")

    parts.append('<g stroke="#000000">')
    for ring in input_loops:
        parts.append(f'<path d="{_path(ring)}"/>')
    parts.append("</g>")

    parts.append(f'<g stroke="#cc2222" stroke-width="{0.6 * stroke:.6g}">')
    for arc in graph.arcs:
        a = graph.nodes[arc.a].pos
        b = graph.nodes[arc.b].pos
        parts.append(
            f'<line x1="{a.x:.6g}" y1="{-a.y:.6g}" x2="{b.x:.6g}" y2="{-b.y:.6g}"/>'
        )
    parts.append("</g>")

    parts.append("</g>")
    parts.append('<g stroke="none">')
    for n in graph.nodes:
        if n.kind == "input":
            continue
        color = NODE_COLORS.get(n.kind, "#555555")
        parts.append(
            f'<circle cx="{n.pos.x:.6g}" cy="{-n.pos.y:.6g}" r="{node_r:.6g}" fill="{color}">'
            f"<title>{n.kind} z={n.z:.6g}</title></circle>"
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")


# ---------------------------------------------------------------------------
# OBJ
# ---------------------------------------------------------------------------


def roof_obj(mesh: RoofMesh) -> bytes:
    """ASCII OBJ with z up; triangles grouped by source input edge."""
    lines: list[str] = []
    for v in mesh.vertices:
        lines.append(f"v {format_float(v.x)} {format_float(v.y)} {format_float(v.z)}")
    current = None
    for tri, face in zip(mesh.triangles, mesh.triangle_faces):
        if face != current:
            lines.append(f"g face_{face}")
            current = face
        lines.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    lines.append("")
    return "\n".join(lines).encode("utf-8")


# ---------------------------------------------------------------------------
# figure + table report
# ---------------------------------------------------------------------------


def write_report(
    stem: str,
    input_loops: list[list[Vec2]],
    snapshots: list[Snapshot],
    graph: SkeletonGraph,
    status: str,
) -> tuple[str, str]:
    """Render ``<stem>.png`` and the node table ``<stem>.csv``.

    Returns the two paths written.  The figure mirrors the SVG layers;
    the table lists every skeleton node for spreadsheet-side checks.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 7.0))
    for _, loops in snapshots:
        for ring in loops:
            xs = [p.x for p in ring] + [ring[0].x]
            ys = [p.y for p in ring] + [ring[0].y]
            ax.plot(xs, ys, color="#3366aa", alpha=0.3, linewidth=0.8)
    for ring in input_loops:
        xs = [p.x for p in ring] + [ring[0].x]
        ys = [p.y for p in ring] + [ring[0].y]
        ax.plot(xs, ys, color="black", linewidth=1.6)
    for arc in graph.arcs:
        a = graph.nodes[arc.a].pos
        b = graph.nodes[arc.b].pos
        ax.plot([a.x, b.x], [a.y, b.y], color="#cc2222", linewidth=1.1)
    seen_kinds = []
    for n in graph.nodes:
        if n.kind == "input":
            continue
        label = n.kind if n.kind not in seen_kinds else None
        if label:
            seen_kinds.append(n.kind)
        ax.scatter(
            [n.pos.x], [n.pos.y], s=26, color=NODE_COLORS.get(n.kind, "#555555"), label=label, zorder=5
        )
    if seen_kinds:
        ax.legend(loc="upper right", fontsize=8)
    ax.set_aspect("equal")
    ax.set_title(f"skeleton ({status}, {len(graph.nodes)} nodes, {len(graph.arcs)} arcs)")
    png_path = stem + ".png"
    fig.savefig(png_path, dpi=140, bbox_inches="tight")
    plt.close(fig)

    csv_path = stem + ".csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "kind", "x", "y", "z"])
    for n in graph.nodes:
        writer.writerow([n.id, n.kind, format_float(n.pos.x), format_float(n.pos.y), format_float(n.z)])
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    return png_path, csv_path

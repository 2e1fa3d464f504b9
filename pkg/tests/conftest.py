"""Shared input corpus and drivers for the test suite.

The polygons here are reused across module tests and the acceptance
suite.  ``GENERAL_POSITION`` holds shapes whose events are pairwise
distinct in time and place, so classical counting identities apply;
``REPLAY_CORPUS`` holds the non-convex shapes checked against the
dense-replay verifier, including deliberately degenerate ones (the
mirror-symmetric star, the four-way simultaneous plus).
"""

from __future__ import annotations

import math
import random

from roofskel.kinetics import step
from roofskel.skeleton import SkeletonBuilder
from roofskel.wavefront import build_wavefront

SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
RECT_2X1 = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]

# 2x2 square with a 1x1 corner notch: the smallest polygon with a split
L_SHAPE = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]

# irregular variants, all general position; the L keeps its notch floor
# tilted so no two opposing fronts are parallel (an axis-aligned L with
# uniform weights pinches its arm at the very moment the reflex vertex
# lands, which merges the split and the collapses into one batch)
GENERIC_L = [(0.0, 0.0), (3.0, 0.0), (3.0, 2.0), (1.8, 2.0), (1.8, 0.9), (0.0, 1.2)]
U_SHAPE = [(0.0, 0.0), (5.0, 0.0), (5.0, 3.0), (3.6, 3.1), (3.4, 1.2),
           (1.8, 1.1), (1.6, 2.9), (0.0, 3.0)]
STAR_JAGGED = [(2.0, 0.0), (2.71, 1.18), (4.05, 1.44), (3.04, 2.46), (3.18, 3.83),
               (1.96, 3.22), (0.83, 3.74), (1.08, 2.39), (-0.05, 1.31), (1.42, 1.15)]
HEPTAGON = [(0.0, 0.0), (2.3, -0.4), (4.1, 0.7), (4.6, 2.6), (3.1, 3.9),
            (1.1, 3.6), (-0.6, 1.9)]
ZIGZAG = [(0.0, 0.0), (4.0, 0.3), (3.7, 1.1), (2.2, 0.8), (2.5, 2.3),
          (1.1, 2.0), (0.4, 2.9), (-0.3, 1.2)]
PENTAGON_SHORT_EDGE = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.9, 2.05), (0.0, 2.0)]

# mirror-symmetric star: every event lands on the symmetry axis
STAR = [(2.0, 0.0), (2.6, 1.2), (4.0, 1.4), (3.0, 2.4), (3.2, 3.8),
        (2.0, 3.2), (0.8, 3.8), (1.0, 2.4), (0.0, 1.4), (1.4, 1.2)]

# plus/cross: four reflex vertices meet at the center simultaneously
PLUS = [(1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (3.0, 1.0), (3.0, 2.0), (2.0, 2.0),
        (2.0, 3.0), (1.0, 3.0), (1.0, 2.0), (0.0, 2.0), (0.0, 1.0), (1.0, 1.0)]

HOLE_SQUARE = [
    [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)],
    [(1.7, 2.0), (2.4, 1.3), (3.1, 2.0), (2.4, 2.7)],
]

REPLAY_CORPUS: dict[str, list[list[tuple[float, float]]]] = {
    "l_shape": [L_SHAPE],
    "u_shape": [U_SHAPE],
    "star": [STAR],
    "plus": [PLUS],
    "hole_square": HOLE_SQUARE,
}

GENERAL_POSITION: dict[str, list[tuple[float, float]]] = {
    "generic_l": GENERIC_L,
    "u_shape": U_SHAPE,
    "star_jagged": STAR_JAGGED,
    "heptagon": HEPTAGON,
    "zigzag": ZIGZAG,
    "pentagon": PENTAGON_SHORT_EDGE,
}


def uniform_alphas(loops: list[list[tuple[float, float]]]) -> list[float]:
    return [math.pi / 4.0] * sum(len(ring) for ring in loops)


def drive(loops, alphas, dt: float = 0.05, vz: float = 1.0, limit: int = 8000):
    """Run a wavefront to termination; returns (wavefront, builder)."""
    w = build_wavefront(loops, alphas)
    builder = SkeletonBuilder(w)
    for _ in range(limit):
        if w.is_terminated():
            break
        step(w, dt, vz, builder)
    return w, builder


def world_graph(w, builder):
    return builder.graph().to_world(w.frame)


def node_arc_lists(graph, vz: float = 1.0):
    """Graph as positional tuples for the node-matching helpers."""
    index = {n.id: i for i, n in enumerate(graph.nodes)}
    nodes = [(n.pos.x, n.pos.y, n.z / vz) for n in graph.nodes]
    arcs = [(index[a.a], index[a.b]) for a in graph.arcs]
    return nodes, arcs


def _is_convex(points: list[tuple[float, float]]) -> bool:
    n = len(points)
    for i in range(n):
        ax, ay = points[i]
        bx, by = points[(i + 1) % n]
        cx, cy = points[(i + 2) % n]
        if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) <= 1e-9:
            return False
    return True


def random_convex_polygon(rng: random.Random, n: int) -> list[tuple[float, float]]:
    """Strictly convex n-gon: jittered angles and radii around a circle."""
    while True:
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
        gaps = [b - a for a, b in zip(angles, angles[1:])]
        gaps.append(2.0 * math.pi - angles[-1] + angles[0])
        if min(gaps) < 0.25:
            continue
        pts = [
            (r * math.cos(a), r * math.sin(a))
            for a, r in ((a, rng.uniform(0.92, 1.08)) for a in angles)
        ]
        if _is_convex(pts):
            return pts

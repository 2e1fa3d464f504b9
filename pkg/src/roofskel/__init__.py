"""Weighted straight skeletons and roof models from a kinetic wavefront."""

from __future__ import annotations

from .document import DocumentError, EdgeSpec, PolygonDocument, parse_document, serialize_document
from .geom import Tolerances, Vec2, Vec3
from .kinetics import KineticEvent, RobustnessFault, StepResult, settle, step
from .oracle import OracleReport, convex_bisector_skeleton, dense_replay, verify_skeleton
from .outputs import roof_obj, skeleton_json, wavefront_svg, write_report
from .session import EditError, Session, SessionConflict, SessionManager, run_batch
from .skeleton import HeightSchedule, SkeletonBuilder, SkeletonGraph, build_roof_mesh
from .velocity import alpha_from_weight, weight_from_alpha
from .wavefront import (
    Wavefront,
    WavefrontError,
    build_wavefront,
    insert_vertex_manual,
    remove_vertex_manual,
)

__all__ = [
    "DocumentError",
    "EdgeSpec",
    "PolygonDocument",
    "parse_document",
    "serialize_document",
    "Tolerances",
    "Vec2",
    "Vec3",
    "KineticEvent",
    "RobustnessFault",
    "StepResult",
    "settle",
    "step",
    "OracleReport",
    "convex_bisector_skeleton",
    "dense_replay",
    "verify_skeleton",
    "roof_obj",
    "skeleton_json",
    "wavefront_svg",
    "write_report",
    "EditError",
    "Session",
    "SessionConflict",
    "SessionManager",
    "run_batch",
    "HeightSchedule",
    "SkeletonBuilder",
    "SkeletonGraph",
    "build_roof_mesh",
    "alpha_from_weight",
    "weight_from_alpha",
    "Wavefront",
    "WavefrontError",
    "build_wavefront",
    "insert_vertex_manual",
    "remove_vertex_manual",
]

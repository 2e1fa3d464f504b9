"""The two independent reference constructions and their comparators."""

from __future__ import annotations

import math

import pytest

from conftest import L_SHAPE, PLUS, SQUARE, drive, uniform_alphas, world_graph
from roofskel.geom import Vec2
from roofskel.oracle import (
    arcs_match,
    cluster_events,
    compare_event_logs,
    convex_bisector_skeleton,
    dense_replay,
    graph_event_log,
    match_node_sets,
    verify_skeleton,
)
from roofskel.velocity import alpha_from_weight

PI4 = math.pi / 4


def interior(nodes):
    return [(x, y, z) for x, y, z, kind in nodes if kind != "input"]


# -- offset-line construction ---------------------------------------------------


def test_bisector_skeleton_of_unit_square():
    nodes, arcs = convex_bisector_skeleton(SQUARE, [PI4] * 4)
    assert interior(nodes) == [pytest.approx((0.5, 0.5, 0.5), abs=1e-12)]
    # four arcs, one per corner, all ending at the apex
    assert sorted(arcs) == [(0, 4), (1, 4), (2, 4), (3, 4)]


def test_bisector_skeleton_of_2x1_rectangle():
    # by hand: 45-degree corner bisectors meet at (0.5, 0.5) and
    # (1.5, 0.5) at height 0.5, joined by the horizontal ridge
    nodes, arcs = convex_bisector_skeleton(
        [(0, 0), (2, 0), (2, 1), (0, 1)], [PI4] * 4
    )
    want = [
        (0.0, 0.0, 0.0),
        (2.0, 0.0, 0.0),
        (2.0, 1.0, 0.0),
        (0.0, 1.0, 0.0),
        (1.5, 0.5, 0.5),
        (0.5, 0.5, 0.5),
    ]
    mapping = match_node_sets([(x, y, z) for x, y, z, _ in nodes], want, 1e-12)
    assert mapping is not None
    want_arcs = [(0, 5), (1, 4), (2, 4), (3, 5), (4, 5)]
    assert arcs_match(arcs, want_arcs, mapping)


def test_bisector_skeleton_with_one_fast_edge():
    # left edge three times as fast: its plane x = 3z meets x = 1 - z at
    # z = 1/4, pushing the ridge to x = 3/4
    alphas = [PI4, PI4, PI4, alpha_from_weight(3.0)]
    nodes, arcs = convex_bisector_skeleton(SQUARE, alphas)
    got = interior(nodes)
    assert sorted(got) == [
        pytest.approx((0.75, 0.25, 0.25), abs=1e-12),
        pytest.approx((0.75, 0.75, 0.25), abs=1e-12),
    ]
    assert len(arcs) == 5


def test_bisector_skeleton_rejects_bad_rings():
    with pytest.raises(ValueError):
        convex_bisector_skeleton([(0, 0), (1, 0)], [PI4] * 2)
    with pytest.raises(ValueError):
        convex_bisector_skeleton(list(reversed(SQUARE)), [PI4] * 4)  # clockwise
    with pytest.raises(ValueError):
        convex_bisector_skeleton(SQUARE, [PI4] * 3)


# -- dense replay ----------------------------------------------------------------


def test_replay_square_terminates_with_single_collapse_cluster():
    rep = dense_replay([SQUARE], [PI4] * 4, dt_small=1e-3)
    assert rep.terminated
    assert rep.inconclusive == []
    assert rep.resolution > 0.0
    reps = cluster_events(rep.events, 10.0 * rep.resolution, 10.0 * rep.resolution)
    assert len(reps) == 1
    t, kind, x, y = reps[0]
    assert kind == "collapse"
    assert (t, x, y) == pytest.approx((0.5, 0.5, 0.5), abs=rep.resolution)


def test_replay_resolution_tightens_with_the_step():
    coarse = dense_replay([L_SHAPE], [PI4] * 6, dt_small=1e-3)
    fine = dense_replay([L_SHAPE], [PI4] * 6, dt_small=1e-4)
    assert coarse.terminated and fine.terminated
    assert fine.resolution < coarse.resolution
    slack = coarse.resolution + fine.resolution
    assert compare_event_logs(fine.events, coarse.events, slack, slack) == []


def test_replay_sees_the_plus_meeting_in_the_middle():
    rep = dense_replay([PLUS], uniform_alphas([PLUS]), dt_small=1e-3)
    assert rep.terminated
    kinds = {kind for _, kind, _, _ in rep.events}
    assert "split" in kinds


# -- comparators -----------------------------------------------------------------


def test_match_node_sets_is_order_free():
    got = [(0.0, 0.0, 0.0), (1.0, 1.0, 0.5)]
    want = [(1.0, 1.0 + 1e-12, 0.5), (0.0, 0.0, 0.0)]
    assert match_node_sets(got, want, 1e-9) == {0: 1, 1: 0}


def test_match_node_sets_refuses_ambiguity_and_leftovers():
    pair = [(0.0, 0.0, 0.0), (1e-12, 0.0, 0.0)]
    assert match_node_sets(pair, [(0.0, 0.0, 0.0), (5.0, 0.0, 0.0)], 1e-9) is None
    assert match_node_sets([(0.0, 0.0, 0.0)], [(1.0, 0.0, 0.0)], 1e-9) is None
    assert match_node_sets([(0.0, 0.0, 0.0)], [], 1e-9) is None


def test_arcs_match_ignores_direction_and_order():
    mapping = {0: 2, 1: 0, 2: 1}
    got = [(0, 1), (2, 1)]
    want = [(0, 1), (0, 2)]
    assert arcs_match(got, want, mapping)
    assert not arcs_match(got, [(0, 1), (1, 2)], mapping)


def test_cluster_events_merges_near_duplicates():
    events = [
        (0.5, "collapse", 1.0, 1.0),
        (0.5 + 1e-7, "collapse", 1.0 + 1e-7, 1.0),
        (0.5, "split", 1.0, 1.0),  # different kind survives
        (0.9, "collapse", 1.0, 1.0),  # different time survives
    ]
    reps = cluster_events(events, 1e-6, 1e-6)
    assert len(reps) == 3


def test_compare_event_logs_reports_missing_and_extra():
    a = [(0.5, "collapse", 0.0, 0.0)]
    b = [(0.5, "collapse", 0.0, 0.0), (0.7, "split", 1.0, 1.0)]
    problems = compare_event_logs(a, b, 1e-6, 1e-6)
    assert len(problems) == 1
    assert "missing split" in problems[0]
    assert compare_event_logs(b, a, 1e-6, 1e-6)[0].startswith("extra split")
    assert compare_event_logs(a, a, 1e-6, 1e-6) == []


def test_graph_event_log_reads_interior_nodes():
    w, builder = drive([SQUARE], [PI4] * 4)
    log = graph_event_log(world_graph(w, builder))
    assert len(log) == 1
    t, kind, x, y = log[0]
    assert kind == "collapse"
    assert (t, x, y) == pytest.approx((0.5, 0.5, 0.5), abs=1e-9)


# -- one-call verification ---------------------------------------------------------


def test_verify_skeleton_passes_convex_and_nonconvex_runs():
    for loops in ([SQUARE], [L_SHAPE]):
        alphas = uniform_alphas(loops)
        w, builder = drive(loops, alphas)
        report = verify_skeleton(loops, alphas, world_graph(w, builder))
        assert report.ok, report.notes
        assert report.max_position_error <= 1e-9 or len(loops[0]) > 4


def test_verify_skeleton_flags_a_displaced_node():
    w, builder = drive([SQUARE], [PI4] * 4)
    g = world_graph(w, builder)
    apex = g.interior_nodes()[0]
    g.nodes[apex.id].pos = Vec2(apex.pos.x + 0.05, apex.pos.y)
    report = verify_skeleton([SQUARE], [PI4] * 4, g)
    assert not report.event_sequence_match
    assert "node sets differ" in report.notes or "position" in report.notes

"""Planar primitives: projections, crossing interpolation, frames."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from roofskel.geom import (
    NormFrame,
    Tolerances,
    Vec2,
    polygon_contains,
    project_length,
    segments_properly_intersect,
    signed_area,
    xi_to_dt,
    zero_crossing_xi,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def interpolant(f_n: float, f_np1: float, xi: float) -> float:
    """The linear blend the crossing parameter is defined against."""
    return 0.5 * (1.0 - xi) * f_n + 0.5 * (1.0 + xi) * f_np1


def bisect_crossing(f_n: float, f_np1: float) -> float:
    """Independent root finder for the same linear blend."""
    lo, hi = -1.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if (interpolant(f_n, f_np1, lo) > 0.0) == (interpolant(f_n, f_np1, mid) > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_project_length_identity_and_flip():
    assert project_length(Vec2(1, 0), Vec2(1, 0)) == 1.0
    assert project_length(Vec2(-1, 0), Vec2(1, 0)) == -1.0


def test_project_length_agrees_with_componentwise_sum():
    d, u = Vec2(3.0, 4.0), Vec2(0.6, 0.8)
    assert project_length(d, u) == pytest.approx(5.0, abs=1e-15)
    assert project_length(d, u) == pytest.approx(d.x * u.x + d.y * u.y, abs=0.0)


def test_zero_crossing_symmetric_is_midpoint():
    assert zero_crossing_xi(1.0, -1.0) == 0.0


def test_zero_crossing_at_increment_end():
    assert zero_crossing_xi(1.0, 0.0) == 1.0


def test_zero_crossing_quarter_case_matches_bisection():
    xi = zero_crossing_xi(0.25, -0.75)
    assert xi == pytest.approx(-0.5, abs=1e-15)
    assert xi == pytest.approx(bisect_crossing(0.25, -0.75), abs=1e-12)


def test_zero_crossing_none_without_sign_change():
    assert zero_crossing_xi(1.0, 0.5) is None
    assert zero_crossing_xi(-1.0, -0.5) is None


def test_zero_crossing_constant_inside_band_fires_immediately():
    assert zero_crossing_xi(1e-12, 1e-12) == -1.0
    assert zero_crossing_xi(5.0, 5.0) is None


@given(
    f_n=finite.filter(lambda v: abs(v) > 1e-6),
    f_np1=finite.filter(lambda v: abs(v) > 1e-6),
)
def test_zero_crossing_root_property(f_n, f_np1):
    xi = zero_crossing_xi(f_n, f_np1)
    if (f_n > 0.0) == (f_np1 > 0.0):
        assert xi is None
    else:
        assert -1.0 <= xi <= 1.0
        scale = max(abs(f_n), abs(f_np1))
        assert abs(interpolant(f_n, f_np1, xi)) <= 1e-12 * scale


def test_xi_to_dt_endpoints_and_midpoint():
    assert xi_to_dt(0.0, 1.0) == 0.5
    assert xi_to_dt(-1.0, 0.8) == 0.0
    assert xi_to_dt(1.0, 0.8) == 0.8


@given(st.floats(min_value=-1.0, max_value=1.0), st.floats(min_value=1e-9, max_value=1e3))
def test_xi_to_dt_stays_inside_increment(xi, dt_n):
    dt = xi_to_dt(xi, dt_n)
    assert 0.0 <= dt <= dt_n


def test_tolerances_reject_nonpositive():
    with pytest.raises(ValueError):
        Tolerances(eps_geom=0.0)
    with pytest.raises(ValueError):
        Tolerances(eps_param=2.0)


def test_frame_normalizes_longest_side_to_one():
    frame = NormFrame.from_points([Vec2(2, 3), Vec2(10, 3), Vec2(10, 7)])
    assert frame.scale == pytest.approx(1.0 / 8.0)
    assert frame.to_norm(Vec2(2, 3)) == Vec2(0, 0)
    assert frame.to_norm(Vec2(10, 3)) == Vec2(1.0, 0.0)


def test_frame_rejects_unrepresentable_extents():
    # a subnormal extent would overflow every height it normalizes
    with pytest.raises(ValueError, match="representable range"):
        NormFrame.from_points([Vec2(0, 0), Vec2(0, 1e-300)])
    with pytest.raises(ValueError, match="representable range"):
        NormFrame.from_points([Vec2(-1e141, 0), Vec2(1e141, 0)])


@given(st.lists(st.tuples(finite, finite), min_size=2, max_size=8))
def test_frame_round_trips_points_and_heights(raw):
    pts = [Vec2(x, y) for x, y in raw]
    try:
        frame = NormFrame.from_points(pts)
    except ValueError:
        return  # zero or unrepresentably small extents are rejected, not mangled
    span = max(abs(p.x) + abs(p.y) for p in pts) + 1.0
    for p in pts:
        back = frame.to_world(frame.to_norm(p))
        assert back.dist(p) <= 1e-9 * span
    assert frame.z_to_world(frame.z_to_norm(3.7)) == pytest.approx(3.7, rel=1e-12)


def test_signed_area_orientation():
    square = [Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)]
    assert signed_area(square) == pytest.approx(1.0)
    assert signed_area(list(reversed(square))) == pytest.approx(-1.0)


def test_polygon_contains_center_not_outside():
    square = [Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)]
    assert polygon_contains(square, Vec2(0.5, 0.5))
    assert not polygon_contains(square, Vec2(1.5, 0.5))


def test_segments_properly_intersect():
    assert segments_properly_intersect(Vec2(0, 0), Vec2(2, 2), Vec2(0, 2), Vec2(2, 0))
    assert not segments_properly_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0))
    # shared endpoint only is not a proper crossing
    assert not segments_properly_intersect(Vec2(0, 0), Vec2(1, 1), Vec2(1, 1), Vec2(2, 0))


def test_perp_right_points_outward_for_ccw_travel():
    # bottom edge of a CCW square travels +x; outward is -y
    assert Vec2(1, 0).perp_right() == Vec2(0, -1)

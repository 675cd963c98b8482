import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefmine import costs
from prefmine.costs import (
    EdgeAttributes,
    PointSet,
    RoadClass,
    classify_road_class,
    clamp_estimate_to_speed_floor,
    derive_congestion,
    derive_cost_table,
    derive_crowdedness,
    derive_travel_time,
    load_edge_attributes,
    load_points,
    unit_cost,
)
from prefmine.errors import (
    EmptyGeometryError,
    ParseError,
    ValidationError,
    ZeroLengthError,
)


def attrs(**kw):
    base = dict(
        length_km=1.0,
        road_class=RoadClass.OTHER,
        travel_time_estimate_s=20.0,
    )
    base.update(kw)
    return EdgeAttributes(**base)


class TestTravelTime:
    def test_no_history_returns_estimate(self):
        assert derive_travel_time(attrs(travel_time_estimate_s=20.0), 10.0) == 20.0

    def test_equal_weight_mean(self):
        a = attrs(
            travel_time_estimate_s=10.0,
            historical_travel_times_s=(20.0,) * 10,
        )
        assert derive_travel_time(a, 10.0) == pytest.approx(15.0)

    def test_default_confidence_is_ten(self):
        a = attrs(
            travel_time_estimate_s=10.0,
            historical_travel_times_s=(20.0,) * 10,
        )
        assert derive_travel_time(a) == derive_travel_time(a, 10.0)
        assert costs.DEFAULT_CONFIDENCE_K == 10.0

    def test_invalid_confidence(self):
        with pytest.raises(ValidationError):
            derive_travel_time(attrs(), 0.0)

    @settings(max_examples=50, deadline=None)
    @given(
        est=st.floats(min_value=1.0, max_value=1e3),
        hist=st.floats(min_value=1.0, max_value=1e3),
        n=st.integers(min_value=1, max_value=200),
    )
    def test_monotone_and_converges_to_history(self, est, hist, n):
        a_small = attrs(
            travel_time_estimate_s=est, historical_travel_times_s=(hist,) * n
        )
        a_more = attrs(
            travel_time_estimate_s=est, historical_travel_times_s=(hist,) * (n * 4)
        )
        t_small = derive_travel_time(a_small)
        t_more = derive_travel_time(a_more)
        # with more history, the blend moves toward the historical mean
        assert abs(t_more - hist) <= abs(t_small - hist) + 1e-9 * max(1.0, hist)
        # monotone in the estimate
        bigger = attrs(
            travel_time_estimate_s=est * 2, historical_travel_times_s=(hist,) * n
        )
        assert derive_travel_time(bigger) >= t_small


class TestCongestion:
    def test_driving_at_limit_is_zero(self):
        a = attrs(length_km=1.0, speed_limit_kmh=100.0)
        tau = 1.0 / 100.0 * 3600.0
        assert derive_congestion(a, tau) == 0.0

    def test_twice_the_limit_time_is_half(self):
        a = attrs(length_km=1.0, speed_limit_kmh=100.0)
        tau = 1.0 / 100.0 * 3600.0
        assert derive_congestion(a, 2 * tau) == pytest.approx(0.5)

    @pytest.mark.parametrize(
        "road_class,limit",
        [
            (RoadClass.MOTORWAY, 130.0),
            (RoadClass.CITY, 50.0),
            (RoadClass.OTHER, 80.0),
        ],
    )
    def test_missing_limit_heuristic(self, road_class, limit):
        a = attrs(length_km=1.0, road_class=road_class, speed_limit_kmh=None)
        tau = 1.0 / limit * 3600.0
        assert derive_congestion(a, tau) == 0.0
        assert derive_congestion(a, 2 * tau) == pytest.approx(0.5)

    def test_zero_length_raises(self):
        with pytest.raises(ZeroLengthError):
            derive_congestion(attrs(length_km=0.0), 10.0)

    @settings(max_examples=50, deadline=None)
    @given(
        length=st.floats(min_value=0.01, max_value=50.0),
        limit=st.floats(min_value=5.0, max_value=130.0),
        tt=st.floats(min_value=0.1, max_value=1e5),
    )
    def test_always_in_unit_interval(self, length, limit, tt):
        a = attrs(length_km=length, speed_limit_kmh=limit)
        assert 0.0 <= derive_congestion(a, tt) <= 1.0


class TestCrowdedness:
    def test_sums_cell_counts(self):
        # 2x1 grid over [0,2]x[0,1]: 3 points left, 5 points right
        pts = PointSet([(0.1, 0.5)] * 3 + [(1.9, 0.5)] * 5)
        got = derive_crowdedness(pts, 2, 1, [(0.2, 0.4), (1.8, 0.6)])
        assert got == 8.0

    def test_empty_point_set_is_zero(self):
        assert derive_crowdedness(PointSet([]), 10, 10, [(0.0, 0.0)]) == 0.0

    def test_same_cell_counted_twice(self):
        pts = PointSet([(0.5, 0.5)] * 4 + [(9.5, 9.5)])
        got = derive_crowdedness(pts, 10, 10, [(0.4, 0.4), (0.6, 0.6)])
        assert got == 8.0

    def test_empty_geometry_raises(self):
        with pytest.raises(EmptyGeometryError):
            derive_crowdedness(PointSet([(0, 0)]), 2, 2, [])

    def test_translation_invariance_and_additivity(self):
        rng = np.random.default_rng(5)
        base = rng.uniform(0, 10, size=(40, 2))
        geom = [(2.0, 3.0), (7.5, 8.5)]
        a = derive_crowdedness(PointSet(base), 20, 20, geom)
        shift = np.array([100.0, -50.0])
        b = derive_crowdedness(
            PointSet(base + shift),
            20,
            20,
            [(x + shift[0], y + shift[1]) for x, y in geom],
        )
        assert a == b
        parts = sum(
            derive_crowdedness(PointSet(base), 20, 20, [g]) for g in geom
        )
        assert parts == a


def test_unit_cost_trivia():
    assert unit_cost() == 1.0
    assert sum(unit_cost() for _ in range(7)) == 7.0


def test_classify_road_class_city_if_either_endpoint():
    assert classify_road_class(False, True, False) is RoadClass.CITY
    assert classify_road_class(False, False, True) is RoadClass.CITY
    assert classify_road_class(True, True, True) is RoadClass.MOTORWAY
    assert classify_road_class(False, False, False) is RoadClass.OTHER


def test_speed_floor_clamp():
    # 1 km at 5 km/h is 720 s; slower estimates clamp down to that
    assert clamp_estimate_to_speed_floor(1.0, 10_000.0) == pytest.approx(720.0)
    assert clamp_estimate_to_speed_floor(1.0, 100.0) == 100.0
    assert clamp_estimate_to_speed_floor(0.0, 100.0) == 100.0


ATTR_CSV = """\
# edge_id,length_km,speed_limit_kmh|-,road_class,tt_estimate_s,historical
0,1.0,100.0,other,36.0,40.0;44.0
1,2.0,-,motorway,60.0,
2,0.5,50.0,city,900000.0,30.0
"""


def test_load_edge_attributes():
    table = load_edge_attributes(io.StringIO(ATTR_CSV))
    assert set(table) == {0, 1, 2}
    assert table[0].historical_travel_times_s == (40.0, 44.0)
    assert table[1].speed_limit_kmh is None
    assert table[1].road_class is RoadClass.MOTORWAY
    # speed floor: 0.5 km at 5 km/h = 360 s
    assert table[2].travel_time_estimate_s == pytest.approx(360.0)


def test_load_edge_attributes_rejects_bad_rows():
    with pytest.raises(ParseError):
        load_edge_attributes(io.StringIO("0,1.0,-,other,20.0\n"))
    with pytest.raises(ParseError):
        load_edge_attributes(io.StringIO("0,x,-,other,20.0,\n"))
    with pytest.raises(ParseError):
        load_edge_attributes(io.StringIO("0,1.0,-,alley,20.0,\n"))


def test_load_points_and_bbox():
    ps = load_points(io.StringIO("# pts\n0 0\n1 2\n3 1\n"))
    assert len(ps) == 3
    assert ps.bbox == (0.0, 0.0, 3.0, 2.0)
    with pytest.raises(ParseError):
        load_points(io.StringIO("1 2 3\n"))


def test_derive_cost_table_shapes():
    table_attrs = {
        0: attrs(geometry_points=((0.0, 0.0),)),
        1: attrs(length_km=0.0),
    }
    names, table = derive_cost_table(
        table_attrs, PointSet([(0.0, 0.0), (1.0, 1.0)]), grid_w=4, grid_h=4
    )
    assert names == ("travel_time", "congestion", "crowdedness", "unit")
    assert table[0].shape == (4,)
    assert table[1][1] == 0.0  # zero-length edge gets congestion 0
    assert table[1][2] == 0.0  # no geometry -> crowdedness 0
    assert table[0][3] == 1.0

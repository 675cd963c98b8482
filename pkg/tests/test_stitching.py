import numpy as np
import pytest

from prefmine import stitching
from prefmine.errors import UnsortedInputError, ValidationError
from prefmine.graph import RoadNetwork
from prefmine.stitching import (
    StitchedTrajectory,
    TimedTrajectory,
    pseudo_connected,
    stitch_all,
)
from prefmine.trajectory import Trajectory

MIN = 60.0


@pytest.fixture
def meter_net():
    """Line 0..5 with meter lengths; plus a long 3-edge detour 1->5."""
    edges = [
        (0, 0, 1, [100.0]),
        (1, 1, 2, [150.0]),
        (2, 2, 3, [120.0]),
        (3, 3, 4, [80.0]),
        (4, 4, 5, [90.0]),
        # detour chain 1 -> 6 -> 7 -> 5 of 900 m total
        (5, 1, 6, [300.0]),
        (6, 6, 7, [300.0]),
        (7, 7, 5, [300.0]),
    ]
    return RoadNetwork(list(range(8)), edges, ["length_m"])


def timed(net, tid, edges, vehicle, start, end):
    return TimedTrajectory(
        trajectory=Trajectory(id=tid, edges=tuple(edges)),
        vehicle_id=vehicle,
        start_time=start,
        end_time=end,
    )


class TestPseudoConnected:
    def test_shared_endpoint_gives_empty_connector(self, meter_net):
        t1 = Trajectory(id="a", edges=(0,))
        t2 = Trajectory(id="b", edges=(1,))
        conn = pseudo_connected(meter_net, t1, t2)
        assert conn is not None and conn.is_empty

    def test_single_short_edge_connector(self, meter_net):
        t1 = Trajectory(id="a", edges=(0,))  # ends at 1
        t2 = Trajectory(id="b", edges=(2,))  # starts at 2
        conn = pseudo_connected(meter_net, t1, t2)
        assert conn is not None and conn.edges == (1,)

    def test_long_multi_edge_route_rejected(self, meter_net):
        t1 = Trajectory(id="a", edges=(0,))  # ends at 1
        t2 = Trajectory(id="b", edges=(4,))  # starts at 4: route 1->4 is 350m, 3 edges
        assert pseudo_connected(meter_net, t1, t2) is None

    def test_unreachable_is_none(self, meter_net):
        t1 = Trajectory(id="a", edges=(4,))  # ends at 5, no outgoing edges
        t2 = Trajectory(id="b", edges=(0,))  # starts at 0
        assert pseudo_connected(meter_net, t1, t2) is None

    def test_requires_length_dimension(self):
        net = RoadNetwork(
            [0, 1, 2, 3],
            [(0, 0, 1, [1.0]), (1, 1, 2, [1.0]), (2, 2, 3, [1.0])],
            ["cost"],
        )
        t1 = Trajectory(id="a", edges=(0,))  # ends at 1
        # shared endpoint works without any length dimension
        assert pseudo_connected(net, t1, Trajectory(id="c", edges=(1,))) is not None
        # a real gap needs the meter dimension, which this network lacks
        with pytest.raises(ValidationError):
            pseudo_connected(net, t1, Trajectory(id="d", edges=(2,)))


class TestStitchAll:
    def test_ten_minute_gap_shared_endpoint(self, meter_net):
        inputs = [
            timed(meter_net, "t1", (0,), "v", 0.0, 5 * MIN),
            timed(meter_net, "t2", (1, 2), "v", 15 * MIN, 25 * MIN),
        ]
        out = stitch_all(meter_net, inputs)
        assert len(out) == 1
        st = out[0]
        assert st.trajectory.edges == (0, 1, 2)
        assert st.break_points == (1,)
        assert st.stitch_edges == ()
        assert st.start_time == 0.0 and st.end_time == 25 * MIN

    def test_forty_five_minute_gap_stays_apart(self, meter_net):
        inputs = [
            timed(meter_net, "t1", (0,), "v", 0.0, 5 * MIN),
            timed(meter_net, "t2", (1, 2), "v", 50 * MIN, 60 * MIN),
        ]
        out = stitch_all(meter_net, inputs)
        assert len(out) == 2
        assert all(not st.break_points for st in out)

    def test_chain_of_three_tracks_end_time(self, meter_net):
        # gap t1->t2 is 10 min; t2->t3 is 12 min from t2's end: the running
        # end time must follow the last stitched piece
        inputs = [
            timed(meter_net, "t1", (0,), "v", 0.0, 5 * MIN),
            timed(meter_net, "t2", (1,), "v", 15 * MIN, 20 * MIN),
            timed(meter_net, "t3", (2, 3), "v", 32 * MIN, 45 * MIN),
        ]
        out = stitch_all(meter_net, inputs)
        assert len(out) == 1
        st = out[0]
        assert st.trajectory.edges == (0, 1, 2, 3)
        assert st.break_points == (1, 2)
        assert st.end_time == 45 * MIN
        assert st.source_ids == ("t1", "t2", "t3")

    def test_gap_measured_from_previous_end_not_stitched_start(self, meter_net):
        # t3 is 40 min after t1's end but only 10 after t2's: still stitches
        inputs = [
            timed(meter_net, "t1", (0,), "v", 0.0, 5 * MIN),
            timed(meter_net, "t2", (1,), "v", 20 * MIN, 35 * MIN),
            timed(meter_net, "t3", (2,), "v", 45 * MIN, 50 * MIN),
        ]
        out = stitch_all(meter_net, inputs)
        assert len(out) == 1
        assert out[0].break_points == (1, 2)

    def test_connector_edges_inserted_and_positions_recorded(self, meter_net):
        # t1 ends at node 1, t2 starts at node 2: 150 m single-edge connector
        inputs = [
            timed(meter_net, "t1", (0,), "v", 0.0, 5 * MIN),
            timed(meter_net, "t2", (2,), "v", 15 * MIN, 20 * MIN),
        ]
        out = stitch_all(meter_net, inputs)
        assert len(out) == 1
        st = out[0]
        assert st.trajectory.edges == (0, 1, 2)
        assert st.stitch_edges == (1,)
        # break marks where the next original trajectory begins
        assert st.break_points == (2,)

    def test_unsorted_input_rejected(self, meter_net):
        inputs = [
            timed(meter_net, "t1", (0,), "v", 100.0, 200.0),
            timed(meter_net, "t2", (1,), "v", 0.0, 50.0),
        ]
        with pytest.raises(UnsortedInputError):
            stitch_all(meter_net, inputs)

    def test_vehicles_kept_separate(self, meter_net):
        inputs = [
            timed(meter_net, "t1", (0,), "v1", 0.0, 5 * MIN),
            timed(meter_net, "t2", (1,), "v2", 6 * MIN, 10 * MIN),
        ]
        out = stitch_all(meter_net, inputs)
        assert len(out) == 2
        assert {st.vehicle_id for st in out} == {"v1", "v2"}


def random_vehicle_history(rng, net, vehicle, n_trajs):
    """Random per-vehicle timed trajectories walking along the line."""
    items = []
    clock = float(rng.uniform(0, 1000))
    for i in range(n_trajs):
        start_node = int(rng.integers(0, 4))
        length = int(rng.integers(1, 5 - start_node + 1))
        edges = tuple(range(start_node, start_node + length))
        duration = float(rng.uniform(60, 600))
        items.append(
            timed(net, f"{vehicle}_{i}", edges, vehicle, clock, clock + duration)
        )
        clock += duration + float(rng.uniform(60, 3600))
    return items


class TestConservationInvariants:
    def test_edges_and_counts_conserved_on_random_histories(self, meter_net):
        rng = np.random.default_rng(31)
        for trial in range(100):
            history = random_vehicle_history(
                rng, meter_net, f"veh{trial}", int(rng.integers(1, 7))
            )
            out = stitch_all(meter_net, history)
            # outputs + break points == inputs
            n_breaks = sum(len(st.break_points) for st in out)
            assert len(out) + n_breaks == len(history)
            # edge multiset conservation: inputs plus connectors, nothing lost
            from collections import Counter

            in_edges = Counter(
                e for tt in history for e in tt.trajectory.edges
            )
            connector_positions = {
                (st.trajectory.id, pos) for st in out for pos in st.stitch_edges
            }
            out_edges = Counter()
            for st in out:
                for pos, e in enumerate(st.trajectory.edges):
                    if (st.trajectory.id, pos) not in connector_positions:
                        out_edges[e] += 1
            assert in_edges == out_edges
            # temporal order within the vehicle is preserved
            starts = [st.start_time for st in out]
            assert starts == sorted(starts)
            # every recorded gap obeys the threshold
            for st in out:
                if len(st.source_ids) > 1:
                    by_id = {tt.trajectory.id: tt for tt in history}
                    end = by_id[st.source_ids[0]].end_time
                    for nxt_id in st.source_ids[1:]:
                        nxt = by_id[nxt_id]
                        assert nxt.start_time - end <= stitching.DEFAULT_GAP_MAX_S
                        end = nxt.end_time

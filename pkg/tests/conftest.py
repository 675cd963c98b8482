import numpy as np
import pytest

from prefmine.graph import RoadNetwork
from prefmine import synth


@pytest.fixture
def two_node_net():
    """One edge between two nodes, d=2."""
    return RoadNetwork([0, 1], [(0, 0, 1, [1.0, 2.0])], ["a", "b"])


@pytest.fixture
def parallel_net():
    """Two parallel edges with opposing costs plus a return edge."""
    return RoadNetwork(
        [0, 1],
        [
            (0, 0, 1, [1.0, 10.0]),
            (1, 0, 1, [10.0, 1.0]),
            (2, 1, 0, [1.0, 1.0]),
        ],
        ["a", "b"],
    )


@pytest.fixture
def diamond_net():
    """4-node diamond: two routes 0->3 plus a direct edge."""
    return RoadNetwork(
        [0, 1, 2, 3],
        [
            (0, 0, 1, [1.0, 4.0]),
            (1, 1, 3, [1.0, 4.0]),
            (2, 0, 2, [4.0, 1.0]),
            (3, 2, 3, [4.0, 1.0]),
            (4, 0, 3, [3.0, 3.0]),
        ],
        ["a", "b"],
    )


@pytest.fixture
def dominated_net():
    """Edge 0 is componentwise costlier than the 2-edge bypass via node 1."""
    return RoadNetwork(
        [0, 1, 2],
        [
            (0, 0, 2, [5.0, 5.0]),
            (1, 0, 1, [1.0, 1.0]),
            (2, 1, 2, [1.0, 1.0]),
        ],
        ["a", "b"],
    )


@pytest.fixture
def loop_net():
    """Line 0->1->2 with a self-loop at node 1."""
    return RoadNetwork(
        [0, 1, 2],
        [
            (0, 0, 1, [1.0, 1.0]),
            (1, 1, 1, [0.5, 0.5]),
            (2, 1, 2, [1.0, 1.0]),
        ],
        ["a", "b"],
    )


@pytest.fixture(scope="session")
def small_grid():
    """6x6 normalized grid, d=4 with unit dim; shared across tests."""
    cfg = synth.SynthConfig(grid_w=6, grid_h=6, rng_seed=17)
    return synth.generate_grid_network(cfg)


def random_multigraph(rng, max_nodes=8, d=None, edge_prob=0.4, parallel_prob=0.15):
    """Random connected-ish multigraph for differential tests."""
    n = int(rng.integers(3, max_nodes + 1))
    d = d or int(rng.choice([2, 3, 4]))
    edges, eid = [], 0
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            if rng.random() < edge_prob:
                edges.append((eid, u, v, rng.uniform(0.1, 5.0, d)))
                eid += 1
            if rng.random() < parallel_prob:
                edges.append((eid, u, v, rng.uniform(0.1, 5.0, d)))
                eid += 1
    if not edges:
        edges = [(0, 0, 1, rng.uniform(0.1, 5.0, d))]
    return RoadNetwork(list(range(n)), edges, [f"c{i}" for i in range(d)])


def random_simplex(rng, d):
    w = rng.exponential(1.0, d)
    return w / w.sum()

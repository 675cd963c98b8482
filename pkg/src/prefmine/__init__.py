"""Trajectory segmentation and driving-preference mining on road networks.

A trajectory is explained by the preference (nonnegative weights over the
network's cost types, summing to one) under which it is a shortest path,
or failing that, by the preference minimizing how far it is from one.
Segmentation splits a trajectory into the fewest personalized-path pieces;
mining recovers a single robust preference per trajectory.
"""

from . import _kernel
from .errors import PrefmineError
from .graph import RoadNetwork, dump_network, load_network, normalize_costs
from .preference import MiningResult, is_personalized_path, recover_preference
from .routing import Path, path_cost_vector, personalized_cost, shortest_path
from .segmentation import Criterion, Segmentation, segment
from .stitching import StitchedTrajectory, TimedTrajectory, stitch_all
from .trajectory import Trajectory, strip_self_loops

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active shortest-path kernel (``cython`` or ``python``)."""
    return _kernel.backend()


__all__ = [
    "Criterion",
    "MiningResult",
    "Path",
    "PrefmineError",
    "RoadNetwork",
    "Segmentation",
    "StitchedTrajectory",
    "TimedTrajectory",
    "Trajectory",
    "dump_network",
    "is_personalized_path",
    "kernel_backend",
    "load_network",
    "normalize_costs",
    "path_cost_vector",
    "personalized_cost",
    "recover_preference",
    "segment",
    "shortest_path",
    "stitch_all",
    "strip_self_loops",
    "__version__",
]

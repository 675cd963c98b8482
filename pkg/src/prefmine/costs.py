"""Derivation of per-edge traversal costs from raw road attributes.

Four cost types: travel time (confidence-weighted blend of an external
estimate with historical traversals), congestion (shortfall against the
speed-limit travel time), crowdedness (map-point density along the edge
geometry) and a unit cost (1 per edge, so its path sum is the hop count).

Attribute ingestion format, one CSV row per edge:

    edge_id,length_km,speed_limit_kmh|-,road_class,tt_estimate_s,historical_times

with historical times semicolon-separated (possibly empty) and road_class
one of motorway/city/other. Point sets and edge geometries are plain text
files with one "x y" pair per line.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyGeometryError,
    ParseError,
    ValidationError,
    ZeroLengthError,
)

DEFAULT_CONFIDENCE_K = 10.0
MIN_SPEED_KMH = 5.0
DEFAULT_GRID_W = 2000
DEFAULT_GRID_H = 2000

COST_NAMES = ("travel_time", "congestion", "crowdedness", "unit")


class RoadClass(Enum):
    MOTORWAY = "motorway"
    CITY = "city"
    OTHER = "other"


# Fallback speed limits (km/h) when the edge has none recorded.
HEURISTIC_SPEED_KMH = {
    RoadClass.MOTORWAY: 130.0,
    RoadClass.CITY: 50.0,
    RoadClass.OTHER: 80.0,
}


def classify_road_class(
    is_motorway: bool, source_in_city: bool, target_in_city: bool
) -> RoadClass:
    """An edge counts as city if either endpoint is in a city area."""
    if is_motorway:
        return RoadClass.MOTORWAY
    if source_in_city or target_in_city:
        return RoadClass.CITY
    return RoadClass.OTHER


@dataclass(frozen=True)
class EdgeAttributes:
    """Raw per-edge inputs the cost derivations consume."""

    length_km: float
    road_class: RoadClass
    travel_time_estimate_s: float
    speed_limit_kmh: float | None = None
    historical_travel_times_s: tuple[float, ...] = ()
    geometry_points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.length_km < 0:
            raise ValidationError("length_km must be nonnegative")
        if self.travel_time_estimate_s <= 0:
            raise ValidationError("travel_time_estimate_s must be positive")
        if self.speed_limit_kmh is not None and self.speed_limit_kmh <= 0:
            raise ValidationError("speed_limit_kmh must be positive")
        if any(t <= 0 for t in self.historical_travel_times_s):
            raise ValidationError("historical travel times must be positive")


class PointSet:
    """2D points with their bounding box and memoized grid cell counts."""

    def __init__(self, points: Sequence[tuple[float, float]]):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        if len(self.points):
            self.bbox = (
                float(self.points[:, 0].min()),
                float(self.points[:, 1].min()),
                float(self.points[:, 0].max()),
                float(self.points[:, 1].max()),
            )
        else:
            self.bbox = None
        self._grids: dict[tuple[int, int], np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.points)

    def cell_of(self, x: float, y: float, grid_w: int, grid_h: int) -> tuple[int, int]:
        """Grid cell of a point, clamped into the bounding box."""
        xmin, ymin, xmax, ymax = self.bbox
        spanx = xmax - xmin
        spany = ymax - ymin
        ix = 0 if spanx == 0 else int((x - xmin) / spanx * grid_w)
        iy = 0 if spany == 0 else int((y - ymin) / spany * grid_h)
        return min(max(ix, 0), grid_w - 1), min(max(iy, 0), grid_h - 1)

    def cell_counts(self, grid_w: int, grid_h: int) -> np.ndarray:
        key = (grid_w, grid_h)
        if key not in self._grids:
            counts = np.zeros((grid_w, grid_h), dtype=np.int64)
            for x, y in self.points:
                ix, iy = self.cell_of(x, y, grid_w, grid_h)
                counts[ix, iy] += 1
            self._grids[key] = counts
        return self._grids[key]


def derive_travel_time(
    attrs: EdgeAttributes, confidence_k: float = DEFAULT_CONFIDENCE_K
) -> float:
    """Blend the external estimate with the historical mean.

    The estimate carries weight ``confidence_k``; each historical traversal
    carries weight one, so with no history the estimate is returned exactly
    and with abundant history the historical mean dominates.
    """
    if confidence_k <= 0:
        raise ValidationError("confidence_k must be positive")
    n = len(attrs.historical_travel_times_s)
    if n == 0:
        return attrs.travel_time_estimate_s
    hist_mean = sum(attrs.historical_travel_times_s) / n
    return (confidence_k * attrs.travel_time_estimate_s + n * hist_mean) / (
        confidence_k + n
    )


def resolve_speed_limit(attrs: EdgeAttributes) -> float:
    if attrs.speed_limit_kmh is not None:
        return attrs.speed_limit_kmh
    return HEURISTIC_SPEED_KMH[attrs.road_class]


def derive_congestion(attrs: EdgeAttributes, travel_time_s: float) -> float:
    """Shortfall of the actual travel time against the speed-limit time.

    0 means traffic flows at (or above) the speed limit; values approach 1
    as the edge becomes impassable. Zero-length edges have no speed-limit
    travel time; callers assign those congestion 0.
    """
    if travel_time_s <= 0:
        raise ValidationError("travel_time_s must be positive")
    if attrs.length_km == 0:
        raise ZeroLengthError("zero-length edge has no speed-limit travel time")
    limit_kmh = resolve_speed_limit(attrs)
    limit_time_s = attrs.length_km / limit_kmh * 3600.0
    return min(max(1.0 - limit_time_s / travel_time_s, 0.0), 1.0)


def derive_crowdedness(
    points: PointSet,
    grid_w: int,
    grid_h: int,
    edge_geometry: Sequence[tuple[float, float]],
) -> float:
    """Sum of grid cell counts over the edge's geometry points.

    Each geometry point contributes its cell's full count, so two geometry
    points in the same cell count it twice.
    """
    if grid_w < 1 or grid_h < 1:
        raise ValidationError("grid dimensions must be >= 1")
    if not len(edge_geometry):
        raise EmptyGeometryError("edge has no geometry points")
    if not len(points):
        return 0.0
    counts = points.cell_counts(grid_w, grid_h)
    total = 0
    for x, y in edge_geometry:
        ix, iy = points.cell_of(x, y, grid_w, grid_h)
        total += int(counts[ix, iy])
    return float(total)


def unit_cost() -> float:
    """Constant 1 per edge; summed over a path it counts intersections."""
    return 1.0


def clamp_estimate_to_speed_floor(
    length_km: float, estimate_s: float, min_speed_kmh: float = MIN_SPEED_KMH
) -> float:
    """Cap the travel-time estimate so the implied speed is >= the floor."""
    if length_km <= 0:
        return estimate_s
    max_time_s = length_km / min_speed_kmh * 3600.0
    return min(estimate_s, max_time_s)


def derive_cost_table(
    attrs_by_edge: dict[int, EdgeAttributes],
    point_set: PointSet | None = None,
    *,
    grid_w: int = DEFAULT_GRID_W,
    grid_h: int = DEFAULT_GRID_H,
    confidence_k: float = DEFAULT_CONFIDENCE_K,
) -> tuple[tuple[str, ...], dict[int, np.ndarray]]:
    """Raw 4-dimensional cost vectors for every edge.

    Zero-length edges get congestion 0; edges without geometry (or with no
    point set supplied) get crowdedness 0. The result is unnormalized.
    """
    table: dict[int, np.ndarray] = {}
    for eid, attrs in attrs_by_edge.items():
        tt = derive_travel_time(attrs, confidence_k)
        try:
            congestion = derive_congestion(attrs, tt)
        except ZeroLengthError:
            congestion = 0.0
        if point_set is None or not attrs.geometry_points:
            crowd = 0.0
        else:
            crowd = derive_crowdedness(
                point_set, grid_w, grid_h, attrs.geometry_points
            )
        table[eid] = np.array([tt, congestion, crowd, unit_cost()])
    return COST_NAMES, table


# ----------------------------------------------------------------------
# Ingestion
# ----------------------------------------------------------------------


def _parse_road_class(token: str, where: str) -> RoadClass:
    try:
        return RoadClass(token.strip().lower())
    except ValueError:
        raise ParseError(f"{where}: unknown road class {token!r}") from None


def load_edge_attributes(source) -> dict[int, EdgeAttributes]:
    """Parse the per-edge attribute CSV; applies the speed-floor clamp."""
    if hasattr(source, "read"):
        rows = list(csv.reader(source))
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    out: dict[int, EdgeAttributes] = {}
    for lineno, row in enumerate(rows, start=1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        where = f"row {lineno}"
        if len(row) != 6:
            raise ParseError(f"{where}: expected 6 columns, got {len(row)}")
        try:
            eid = int(row[0])
            length_km = float(row[1])
            speed = None if row[2].strip() == "-" else float(row[2])
            estimate = float(row[4])
            hist = tuple(
                float(tok) for tok in row[5].split(";") if tok.strip()
            )
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from None
        if eid in out:
            raise ParseError(f"{where}: duplicate edge id {eid}")
        estimate = clamp_estimate_to_speed_floor(length_km, estimate)
        out[eid] = EdgeAttributes(
            length_km=length_km,
            road_class=_parse_road_class(row[3], where),
            travel_time_estimate_s=estimate,
            speed_limit_kmh=speed,
            historical_travel_times_s=hist,
        )
    return out


def load_points(source) -> PointSet:
    """Parse an "x y" per line point file (comments start with #)."""
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    pts = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"line {lineno}: expected 'x y'")
        try:
            pts.append((float(tokens[0]), float(tokens[1])))
        except ValueError:
            raise ParseError(f"line {lineno}: bad coordinate") from None
    for x, y in pts:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError("point coordinates must be finite")
    return PointSet(pts)

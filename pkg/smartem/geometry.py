"""
2.5D world geometry: extruded building footprints and segment blockage queries.

A segment between two 3D points is projected onto the ground plane and
intersected with each footprint. Every boundary crossing counts as a wall
when the building is taller than the segment's interpolated height at that
crossing. Touching a vertex or running along an edge counts as crossing.
"""

import math
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict
from shapely.geometry import LineString, Point, Polygon

from smartem.em import fspl_db
from smartem.errors import DomainError

# Coordinates closer than this (meters) are treated as the same point
_COINCIDENT_M = 1e-9

# Default wall penetration loss at 28 GHz, dB per crossing
DEFAULT_PENETRATION_LOSS_DB = 40.0


class Point3(BaseModel):
    """A point in meters (x east, y north, z up)."""

    model_config = ConfigDict(extra="forbid")

    x: float
    y: float
    z: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())

    def distance_to(self, other: "Point3") -> float:
        return math.dist(self.as_tuple(), other.as_tuple())


class Building(BaseModel):
    """Extruded footprint with a flat roof."""

    model_config = ConfigDict(extra="forbid")

    footprint: list[tuple[float, float]]
    height: float
    penetration_loss_db: float = DEFAULT_PENETRATION_LOSS_DB

    def polygon(self) -> Polygon:
        return Polygon(self.footprint)


class Crossings(NamedTuple):
    """Wall crossings along one segment."""

    count: int
    penetration_db: float


class Segment(NamedTuple):
    """Propagation summary of one straight segment."""

    distance_m: float
    fspl_db: float
    crossings: int
    penetration_db: float

    @property
    def los(self) -> bool:
        return self.crossings == 0


def _check_segment(a: Point3, b: Point3) -> None:
    if a.distance_to(b) <= _COINCIDENT_M:
        raise DomainError("segment endpoints must differ")


def _crossing_points(
    polygon: Polygon, line: LineString, ends: Sequence[tuple[float, float]]
) -> list[tuple[float, float]]:
    """Ground-plane points where ``line`` enters or leaves ``polygon``."""
    overlap = polygon.intersection(line)
    if overlap.is_empty:
        return []

    points: list[tuple[float, float]] = []
    for part in shapely.get_parts(overlap):
        if part.geom_type == "Point":
            # Grazing a vertex: enter and leave at the same place
            points.extend([(part.x, part.y)] * 2)
            continue
        coords = list(part.coords)
        for x, y in (coords[0], coords[-1]):
            is_end = any(math.dist((x, y), e) <= _COINCIDENT_M for e in ends)
            if is_end and shapely.contains_xy(polygon, x, y):
                # Segment starts or stops indoors; no wall there
                continue
            points.append((x, y))
    return points


def _building_crossings(
    a: Point3, b: Point3, building: Building, polygon: Polygon
) -> int:
    low, high = min(a.z, b.z), max(a.z, b.z)
    if math.hypot(b.x - a.x, b.y - a.y) <= _COINCIDENT_M:
        # Vertical segment: only the roof can be crossed
        if shapely.intersects_xy(polygon, a.x, a.y) and low < building.height < high:
            return 1
        return 0

    if building.height <= low:
        return 0

    line = LineString([(a.x, a.y), (b.x, b.y)])
    count = 0
    for x, y in _crossing_points(polygon, line, [(a.x, a.y), (b.x, b.y)]):
        t = line.project(Point(x, y), normalized=True)
        if building.height > a.z + t * (b.z - a.z):
            count += 1
    return count


def wall_crossings(a: Point3, b: Point3, buildings: Iterable[Building]) -> Crossings:
    """
    Count the walls a straight segment goes through.

    Args:
        a: Segment start.
        b: Segment end, distinct from ``a``.
        buildings: Obstacles to test.

    Returns:
        Number of wall crossings and the summed penetration loss in dB.

    Raises:
        DomainError: If ``a`` and ``b`` coincide.
    """
    _check_segment(a, b)
    count, loss = 0, 0.0
    for building in buildings:
        hits = _building_crossings(a, b, building, building.polygon())
        count += hits
        loss += hits * building.penetration_loss_db
    return Crossings(count=count, penetration_db=loss)


def is_los(a: Point3, b: Point3, buildings: Iterable[Building]) -> bool:
    """True when the segment ``a``-``b`` crosses no wall."""
    return wall_crossings(a, b, buildings).count == 0


class Propagator:
    """
    Segment queries against one fixed set of buildings.

    Footprints are indexed with a shapely STRtree and every segment result is
    memoized, so repeated queries (planner iterations re-evaluating the same
    gNB-to-UE links) cost a dictionary lookup. Results are keyed on the
    unordered endpoint pair.
    """

    def __init__(self, buildings: Sequence[Building], frequency_hz: float):
        self.frequency_hz = frequency_hz
        self._buildings = list(buildings)
        self._polygons = [b.polygon() for b in self._buildings]
        self._tree = shapely.STRtree(self._polygons)
        self._cache: dict[tuple, Segment] = {}
        self.queries = 0
        self.hits = 0

    def _candidates(self, a: Point3, b: Point3) -> np.ndarray:
        if math.hypot(b.x - a.x, b.y - a.y) <= _COINCIDENT_M:
            shape = Point(a.x, a.y)
        else:
            shape = LineString([(a.x, a.y), (b.x, b.y)])
        return np.sort(self._tree.query(shape))

    def crossings(self, a: Point3, b: Point3) -> Crossings:
        segment = self.segment(a, b)
        return Crossings(count=segment.crossings, penetration_db=segment.penetration_db)

    def segment(self, a: Point3, b: Point3) -> Segment:
        """Distance, free-space loss and wall crossings of ``a``-``b``."""
        key = tuple(sorted((a.as_tuple(), b.as_tuple())))
        self.queries += 1
        cached = self._cache.get(key)
        if cached is not None:
            self.hits += 1
            return cached

        _check_segment(a, b)
        count, loss = 0, 0.0
        for index in self._candidates(a, b):
            building = self._buildings[int(index)]
            hits = _building_crossings(a, b, building, self._polygons[int(index)])
            count += hits
            loss += hits * building.penetration_loss_db

        distance = a.distance_to(b)
        result = Segment(
            distance_m=distance,
            fspl_db=fspl_db(distance, self.frequency_hz),
            crossings=count,
            penetration_db=loss,
        )
        self._cache[key] = result
        return result

    def indoor(self, point: Point3) -> bool:
        """True when ``point`` lies inside a footprint below its roof."""
        for index in self._tree.query(Point(point.x, point.y)):
            building = self._buildings[int(index)]
            if point.z < building.height and shapely.contains_xy(
                self._polygons[int(index)], point.x, point.y
            ):
                return True
        return False


def azimuth_deg(origin: Point3, target: Point3) -> float:
    """Horizontal bearing from ``origin`` to ``target``, degrees from +x."""
    return math.degrees(math.atan2(target.y - origin.y, target.x - origin.x))


def wrap_degrees(angle: float) -> float:
    """Wrap an angle to (-180, 180]."""
    wrapped = math.fmod(angle + 180.0, 360.0)
    if wrapped <= 0:
        wrapped += 360.0
    return wrapped - 180.0


def signed_offset_deg(origin: Point3, normal_azimuth_deg: float, target: Point3) -> float:
    """Signed horizontal angle of ``target`` from a surface normal."""
    return wrap_degrees(azimuth_deg(origin, target) - normal_azimuth_deg)


def off_normal_angle_deg(
    origin: Point3, normal_azimuth_deg: float, target: Point3
) -> Optional[float]:
    """
    3D angle between a horizontal surface normal and the direction to ``target``.

    Returns:
        Angle in [0, 90) degrees, or None when ``target`` is behind the
        surface or in its plane.
    """
    dx, dy, dz = target.x - origin.x, target.y - origin.y, target.z - origin.z
    norm = math.sqrt(dx * dx + dy * dy + dz * dz)
    if norm <= _COINCIDENT_M:
        return None
    azimuth = math.radians(normal_azimuth_deg)
    cosine = (dx * math.cos(azimuth) + dy * math.sin(azimuth)) / norm
    if cosine <= 1e-12:
        return None
    return math.degrees(math.acos(min(1.0, cosine)))


def footprint_violations(building: Building) -> list[str]:
    """Rule violations of a single building."""
    rules = []
    if len(building.footprint) < 3:
        rules.append("footprint needs at least 3 vertices")
    elif not all(math.isfinite(c) for vertex in building.footprint for c in vertex):
        rules.append("non-finite coordinates")
    else:
        polygon = building.polygon()
        if not polygon.exterior.is_simple or polygon.area <= 0:
            rules.append("footprint is not a simple polygon")
    if not building.height > 0:
        rules.append("height must be positive")
    if not building.penetration_loss_db >= 0:
        rules.append("penetration loss must be non-negative")
    return rules


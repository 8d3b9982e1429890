"""Spatial extent resolution: centers, radii, and OD envelopes to bounding boxes.

Geographic-to-metric conversion uses the equirectangular approximation,
which is accurate at city scale; true map-matching happens later in the
router, so the host only needs envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import EmptyDemandError, MixedModeError, PoleProximityError

METERS_PER_DEGREE_LAT = 111_320.0
MAX_USABLE_LATITUDE = 89.0


@dataclass(frozen=True)
class BoundingBox:
    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float

    def __post_init__(self) -> None:
        if self.min_lon > self.max_lon or self.min_lat > self.max_lat:
            raise ValueError("bbox min must not exceed max on either axis")
        if abs(self.min_lat) > 90 or abs(self.max_lat) > 90:
            raise ValueError("latitude out of range")
        if abs(self.min_lon) > 180 or abs(self.max_lon) > 180:
            raise ValueError("longitude out of range")

    @property
    def center(self) -> tuple[float, float]:
        return ((self.min_lat + self.max_lat) / 2, (self.min_lon + self.max_lon) / 2)

    def contains(self, lat: float, lon: float) -> bool:
        return self.min_lat <= lat <= self.max_lat and self.min_lon <= lon <= self.max_lon

    def area_m2(self) -> float:
        """Equirectangular area of the box in square meters."""
        mid_lat = (self.min_lat + self.max_lat) / 2
        height = (self.max_lat - self.min_lat) * METERS_PER_DEGREE_LAT
        width = (self.max_lon - self.min_lon) * METERS_PER_DEGREE_LAT * math.cos(math.radians(mid_lat))
        return height * width

    def as_osm_string(self) -> str:
        """west,south,east,north ordering used by the OSM retrieval script."""
        return f"{self.min_lon},{self.min_lat},{self.max_lon},{self.max_lat}"


@dataclass(frozen=True)
class RegionSpec:
    """Either an explicit bbox or a center point plus a radius in meters."""

    bbox: BoundingBox | None = None
    center: tuple[float, float] | None = None  # (lat, lon)
    radius_m: float | None = None

    def __post_init__(self) -> None:
        if self.bbox is None and self.center is None:
            raise ValueError("region needs a bbox or a center")
        if self.center is not None:
            lat, lon = self.center
            if abs(lat) > 90 or abs(lon) > 180:
                raise ValueError("center coordinates out of range")
            if self.radius_m is None or self.radius_m < 0:
                raise ValueError("center form requires radius_m >= 0")

    def resolve(self) -> BoundingBox:
        if self.bbox is not None:
            return self.bbox
        lat, lon = self.center
        return compute_bbox_from_center(lat, lon, self.radius_m)


def degree_offsets(lat: float, radius_m: float) -> tuple[float, float]:
    """(dlat, dlon) degree half-widths of a radius at the given latitude."""
    if abs(lat) > MAX_USABLE_LATITUDE:
        raise PoleProximityError(f"latitude {lat} too close to a pole for the longitude conversion")
    dlat = radius_m / METERS_PER_DEGREE_LAT
    dlon = radius_m / (METERS_PER_DEGREE_LAT * math.cos(math.radians(lat)))
    return dlat, dlon


def compute_bbox_from_center(lat: float, lon: float, radius_m: float) -> BoundingBox:
    """Square-ish envelope of the circle with the given center and radius."""
    if radius_m < 0:
        raise ValueError("radius must be >= 0")
    dlat, dlon = degree_offsets(lat, radius_m)
    return BoundingBox(
        min_lon=lon - dlon, min_lat=lat - dlat, max_lon=lon + dlon, max_lat=lat + dlat
    )


def compute_bbox_from_od(pairs: list, margin_m: float = 0.0) -> BoundingBox:
    """Envelope of all origin/destination coordinates, expanded by a margin.

    Accepts ODPair objects in coordinate mode; zone-mode pairs raise MixedModeError.
    """
    if not pairs:
        raise EmptyDemandError("no OD pairs to derive a bbox from")
    points: list[tuple[float, float]] = []  # (lat, lon)
    for pair in pairs:
        if not pair.is_coordinate_mode:
            raise MixedModeError("bbox derivation needs coordinate-mode OD pairs")
        points.append((pair.origin[1], pair.origin[0]))
        points.append((pair.destination[1], pair.destination[0]))
    min_lat = min(p[0] for p in points)
    max_lat = max(p[0] for p in points)
    min_lon = min(p[1] for p in points)
    max_lon = max(p[1] for p in points)
    if margin_m > 0:
        dlat, dlon = degree_offsets((min_lat + max_lat) / 2, margin_m)
        min_lat -= dlat
        max_lat += dlat
        min_lon -= dlon
        max_lon += dlon
    return BoundingBox(min_lon=min_lon, min_lat=min_lat, max_lon=max_lon, max_lat=max_lat)

"""WGS84 <-> local East-North-Up conversions on a spherical earth.

All planar mission math runs in a local tangent plane anchored at a fixed
mission origin. A spherical earth (R = 6,371 km) keeps the error well below
SfM reconstruction noise at mission scale; see docs/coordinates.md for the
axis and sign conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0

# Tangent-plane approximation degrades with distance from the anchor;
# beyond this we refuse rather than return silently wrong coordinates.
MAX_TANGENT_RANGE_M = 50_000.0


class GeodesyError(ValueError):
    """Invalid coordinates or out-of-validity-range conversion."""


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 geodetic position. ``alt`` is meters above the ellipsoid."""

    lat: float
    lon: float
    alt: float = 0.0

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise GeodesyError(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise GeodesyError(f"longitude {self.lon} outside [-180, 180]")
        if not math.isfinite(self.alt):
            raise GeodesyError("altitude must be finite")


@dataclass(frozen=True)
class EnuPoint:
    """Local tangent-plane position in meters: east, north, up."""

    east: float
    north: float
    up: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.east, self.north, self.up))):
            raise GeodesyError("ENU components must be finite")


@dataclass(frozen=True)
class MissionOrigin:
    """Anchor of the local frame. Fixed for the lifetime of a mission."""

    anchor: GeoPoint


def wgs84_to_enu(p: GeoPoint, origin: MissionOrigin, strict: bool = True) -> EnuPoint:
    """Project ``p`` into the local tangent plane at ``origin``.

    Raises GeodesyError when ``p`` is farther than 50 km from the anchor
    (set ``strict=False`` to get the extrapolated value anyway).
    """
    a = origin.anchor
    dlat = math.radians(p.lat - a.lat)
    dlon = math.radians(p.lon - a.lon)
    east = EARTH_RADIUS_M * math.cos(math.radians(a.lat)) * dlon
    north = EARTH_RADIUS_M * dlat
    if strict and math.hypot(east, north) > MAX_TANGENT_RANGE_M:
        raise GeodesyError(
            f"point {p.lat:.5f},{p.lon:.5f} is beyond the 50 km tangent-plane validity radius"
        )
    return EnuPoint(east, north, p.alt - a.alt)


def enu_to_wgs84(v: EnuPoint, origin: MissionOrigin) -> GeoPoint:
    """Exact inverse of :func:`wgs84_to_enu` under the same spherical model."""
    a = origin.anchor
    if math.hypot(v.east, v.north) > MAX_TANGENT_RANGE_M:
        raise GeodesyError("ENU point beyond the 50 km tangent-plane validity radius")
    lat = a.lat + math.degrees(v.north / EARTH_RADIUS_M)
    lon = a.lon + math.degrees(v.east / (EARTH_RADIUS_M * math.cos(math.radians(a.lat))))
    return GeoPoint(lat, lon, a.alt + v.up)


def geodesic_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine great-circle distance in meters, ignoring altitude."""
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))

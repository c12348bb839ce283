"""Boustrophedon (meander) coverage planning over a survey polygon.

The planner works entirely in a rotated "sweep frame": u runs along the
flight lines, v across them. Sweep lines are spaced by the across-track
footprint minus side overlap and centered inside the polygon's v-extent so
that no strip of ground is farther than half a spacing from a line. Each
line is clipped against the polygon over its whole spacing band (not just
the line itself), which is what guarantees full coverage on concave
polygons; `verify_coverage` is the independent brute-force check of that
claim.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import GeometryCollection, MultiPolygon, Polygon, box

from .geodesy import EnuPoint, GeoPoint, MissionOrigin, enu_to_wgs84, wgs84_to_enu
from .sensors import CameraSpec, footprint, gsd


class PlanningError(ValueError):
    pass


class InfeasibleSortieError(PlanningError):
    pass


@dataclass(frozen=True)
class SurveyPolygon:
    """Simple closed polygon of WGS84 vertices (>= 3, positive area)."""

    vertices: tuple[GeoPoint, ...]

    def __init__(self, vertices):
        object.__setattr__(self, "vertices", tuple(vertices))
        if len(self.vertices) < 3:
            raise PlanningError("survey polygon needs at least 3 vertices")

    def to_enu(self, origin: MissionOrigin) -> list[EnuPoint]:
        return [wgs84_to_enu(p, origin) for p in self.vertices]


@dataclass(frozen=True)
class CoverageParams:
    altitude_agl: float
    side_overlap: float = 0.65
    front_overlap: float = 0.75
    heading: float | None = None  # degrees clockwise from north; None = auto
    cruise_speed: float = 5.0
    turn_penalty: float = 3.0
    endurance: float = 1500.0

    def __post_init__(self):
        if self.altitude_agl <= 0:
            raise PlanningError("altitude must be positive")
        for name in ("side_overlap", "front_overlap"):
            val = getattr(self, name)
            if not (0.0 <= val <= 0.95):
                raise PlanningError(f"{name} {val} outside [0, 0.95]")
        if self.cruise_speed <= 0:
            raise PlanningError("cruise speed must be positive")


@dataclass(frozen=True)
class PlanStats:
    total_path_m: float
    est_flight_s: float
    photo_count: int
    line_count: int
    est_gsd: float


@dataclass(frozen=True)
class CoveragePlan:
    waypoints: list[tuple[GeoPoint, str]]
    trigger_distance: float
    line_spacing: float
    heading_deg: float
    altitude_agl: float
    lines: list[tuple[EnuPoint, EnuPoint]]  # directed, traversal order
    photos_by_line: list[list[EnuPoint]]
    stats: PlanStats

    @property
    def photo_positions(self) -> list[EnuPoint]:
        return [p for line in self.photos_by_line for p in line]


def _bearing_deg(de: float, dn: float) -> float:
    """Compass bearing of a planar direction, folded to [0, 180)."""
    return math.degrees(math.atan2(de, dn)) % 180.0


def _sweep_axes(heading_deg: float):
    """Unit vectors (along-line, across-line) in (east, north) components."""
    th = math.radians(heading_deg)
    return (math.sin(th), math.cos(th)), (math.cos(th), -math.sin(th))


def _to_sweep(pts, heading_deg):
    """Map (east, north) arrays to sweep-frame (u, v). Self-inverse."""
    d, p = _sweep_axes(heading_deg)
    e = np.asarray([q[0] for q in pts], dtype=float)
    n = np.asarray([q[1] for q in pts], dtype=float)
    return e * d[0] + n * d[1], e * p[0] + n * p[1]


def _from_sweep(u, v, heading_deg):
    d, p = _sweep_axes(heading_deg)
    return u * d[0] + v * p[0], u * d[1] + v * p[1]


def _validated_uv_polygon(poly: SurveyPolygon, origin: MissionOrigin, heading_deg: float) -> Polygon:
    enu = poly.to_enu(origin)
    u, v = _to_sweep([(p.east, p.north) for p in enu], heading_deg)
    shp = Polygon(zip(u, v))
    if not shp.is_valid:
        raise PlanningError("survey polygon is self-intersecting or otherwise invalid")
    if shp.area <= 0:
        raise PlanningError("survey polygon has zero area")
    return shp


def auto_heading(poly: SurveyPolygon, origin: MissionOrigin | None = None) -> float:
    """Heading of the polygon's longest edge, first occurrence winning ties."""
    if origin is None:
        origin = MissionOrigin(poly.vertices[0])
    enu = poly.to_enu(origin)
    best_len, best_bearing = -1.0, 0.0
    n = len(enu)
    for i in range(n):
        a, b = enu[i], enu[(i + 1) % n]
        length = math.hypot(b.east - a.east, b.north - a.north)
        if length > best_len + 1e-9:
            best_len = length
            best_bearing = _bearing_deg(b.east - a.east, b.north - a.north)
    return best_bearing


def _clip_band_intervals(shp: Polygon, band_lo: float, band_hi: float, merge_gap: float):
    """u-intervals of the polygon within one spacing band, merged when the
    photo extensions would bridge the gap anyway."""
    umin, _, umax, _ = shp.bounds
    band = box(umin - 1.0, band_lo, umax + 1.0, band_hi)
    inter = shp.intersection(band)
    parts = []
    if isinstance(inter, Polygon):
        parts = [inter]
    elif isinstance(inter, (MultiPolygon, GeometryCollection)):
        parts = [g for g in inter.geoms if isinstance(g, Polygon)]
    intervals = sorted((g.bounds[0], g.bounds[2]) for g in parts if not g.is_empty)
    merged: list[list[float]] = []
    for lo, hi in intervals:
        if merged and lo - merged[-1][1] <= merge_gap:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def _photo_stations(length: float, trigger: float) -> list[float]:
    """Trigger stations from 0 every `trigger` meters, always including the end."""
    if length <= 0:
        return [0.0]
    stations = list(np.arange(0.0, length + 1e-9, trigger))
    if length - stations[-1] > 1e-9:
        stations.append(length)
    return stations


def plan_coverage(
    poly: SurveyPolygon,
    cam: CameraSpec,
    params: CoverageParams,
    origin: MissionOrigin,
) -> CoveragePlan:
    heading = params.heading if params.heading is not None else auto_heading(poly, origin)
    shp = _validated_uv_polygon(poly, origin, heading)

    fp = footprint(cam, params.altitude_agl)
    spacing = fp.width * (1.0 - params.side_overlap)
    trigger = fp.height * (1.0 - params.front_overlap)

    _, vmin, _, vmax = shp.bounds
    extent = vmax - vmin
    n_bands = max(1, math.ceil(extent / spacing - 1e-9))
    margin = (extent - (n_bands - 1) * spacing) / 2.0

    # Directed line segments in (u, v), traversal direction alternating.
    segments: list[tuple[float, float, float]] = []  # (u_start, u_end, v) pre-direction
    for k in range(n_bands):
        center = vmin + margin + k * spacing
        lo = max(vmin, center - spacing / 2.0) - 1e-9
        hi = min(vmax, center + spacing / 2.0) + 1e-9
        for u0, u1 in _clip_band_intervals(shp, lo, hi, merge_gap=fp.height):
            segments.append((u0 - fp.height / 2.0, u1 + fp.height / 2.0, center))

    lines: list[tuple[EnuPoint, EnuPoint]] = []
    photos_by_line: list[list[EnuPoint]] = []
    for i, (ua, ub, vc) in enumerate(segments):
        start_u, end_u = (ua, ub) if i % 2 == 0 else (ub, ua)
        length = abs(ub - ua)
        step = (end_u - start_u) / length if length > 0 else 0.0
        photos_u = [start_u + s * step for s in _photo_stations(length, trigger)]
        pe, pn = _from_sweep(np.asarray(photos_u), np.full(len(photos_u), vc), heading)
        photos_by_line.append(
            [EnuPoint(e, n, params.altitude_agl) for e, n in zip(pe, pn)]
        )
        (e0,), (n0,) = _from_sweep(np.asarray([start_u]), np.asarray([vc]), heading)
        (e1,), (n1,) = _from_sweep(np.asarray([end_u]), np.asarray([vc]), heading)
        lines.append(
            (EnuPoint(e0, n0, params.altitude_agl), EnuPoint(e1, n1, params.altitude_agl))
        )

    waypoints: list[tuple[GeoPoint, str]] = []
    for start, end in lines:
        waypoints.append((enu_to_wgs84(start, origin), "line_start"))
        waypoints.append((enu_to_wgs84(end, origin), "line_end"))

    stats = estimate_stats(lines, sum(len(p) for p in photos_by_line), params, cam)
    return CoveragePlan(
        waypoints=waypoints,
        trigger_distance=trigger,
        line_spacing=spacing,
        heading_deg=heading,
        altitude_agl=params.altitude_agl,
        lines=lines,
        photos_by_line=photos_by_line,
        stats=stats,
    )


def estimate_stats(
    lines: list[tuple[EnuPoint, EnuPoint]],
    photo_count: int,
    params: CoverageParams,
    cam: CameraSpec,
) -> PlanStats:
    """Path length and flight-time estimate over directed lines in order."""
    total = 0.0
    for start, end in lines:
        total += math.hypot(end.east - start.east, end.north - start.north)
    for (_, end), (nxt, _) in zip(lines, lines[1:]):
        total += math.hypot(nxt.east - end.east, nxt.north - end.north)
    n = len(lines)
    est_s = total / params.cruise_speed + max(0, n - 1) * params.turn_penalty
    return PlanStats(
        total_path_m=total,
        est_flight_s=est_s,
        photo_count=photo_count,
        line_count=n,
        est_gsd=gsd(cam, params.altitude_agl) if n else 0.0,
    )


def verify_coverage(
    plan: CoveragePlan,
    poly: SurveyPolygon,
    cam: CameraSpec,
    params: CoverageParams,
    origin: MissionOrigin,
    grid_step: float = 1.0,
) -> float:
    """Brute-force coverage check, independent of the planner's geometry.

    Rasterizes the polygon interior at `grid_step` and tests each point
    against the photo footprint rectangles (axis-aligned in the sweep
    frame). Returns covered / total.
    """
    import shapely

    shp = _validated_uv_polygon(poly, origin, plan.heading_deg)
    umin, vmin, umax, vmax = shp.bounds
    us = np.arange(umin + grid_step / 2.0, umax, grid_step)
    vs = np.arange(vmin + grid_step / 2.0, vmax, grid_step)
    if len(us) == 0 or len(vs) == 0:
        return 1.0
    uu, vv = np.meshgrid(us, vs)
    inside = shapely.contains_xy(shp, uu.ravel(), vv.ravel())
    pu, pv = uu.ravel()[inside], vv.ravel()[inside]
    if len(pu) == 0:
        return 1.0
    photos = plan.photo_positions
    if not photos:
        return 0.0

    fp = footprint(cam, params.altitude_agl)
    qu, qv = _to_sweep([(p.east, p.north) for p in photos], plan.heading_deg)
    # Chebyshev distance after scaling by the half-footprint turns the
    # rectangle-containment test into a nearest-neighbor query.
    tree = cKDTree(np.column_stack([qu / (fp.height / 2.0), qv / (fp.width / 2.0)]))
    d, _ = tree.query(
        np.column_stack([pu / (fp.height / 2.0), pv / (fp.width / 2.0)]), p=np.inf
    )
    return float(np.count_nonzero(d <= 1.0 + 1e-9) / len(pu))


def partition_sorties(plan: CoveragePlan, endurance: float, params: CoverageParams, cam: CameraSpec) -> list[CoveragePlan]:
    """Greedy split at line boundaries so each sortie fits the endurance."""
    if endurance <= 0:
        raise PlanningError("endurance must be positive")

    def sortie_time(idx: list[int]) -> float:
        sub = [plan.lines[i] for i in idx]
        return estimate_stats(sub, 0, params, cam).est_flight_s

    groups: list[list[int]] = []
    current: list[int] = []
    for i in range(len(plan.lines)):
        candidate = current + [i]
        if sortie_time(candidate) <= endurance:
            current = candidate
            continue
        if not current:
            raise InfeasibleSortieError(
                f"line {i} alone needs {sortie_time([i]):.0f} s, over the {endurance:.0f} s endurance"
            )
        groups.append(current)
        if sortie_time([i]) > endurance:
            raise InfeasibleSortieError(
                f"line {i} alone needs {sortie_time([i]):.0f} s, over the {endurance:.0f} s endurance"
            )
        current = [i]
    if current:
        groups.append(current)

    sorties = []
    for idx in groups:
        lines = [plan.lines[i] for i in idx]
        photos = [plan.photos_by_line[i] for i in idx]
        waypoints = []
        for i in idx:
            waypoints.extend(plan.waypoints[2 * i : 2 * i + 2])
        stats = estimate_stats(lines, sum(len(p) for p in photos), params, cam)
        sorties.append(
            replace(plan, waypoints=waypoints, lines=lines, photos_by_line=photos, stats=stats)
        )
    return sorties


# --- GeoJSON I/O -----------------------------------------------------------


def parse_polygon_geojson(doc: dict) -> SurveyPolygon:
    """Survey polygon from a GeoJSON Polygon (first ring; holes rejected)."""
    geom = doc
    if doc.get("type") == "FeatureCollection":
        if not doc.get("features"):
            raise PlanningError("empty FeatureCollection")
        geom = doc["features"][0].get("geometry", {})
    elif doc.get("type") == "Feature":
        geom = doc.get("geometry", {})
    if geom.get("type") != "Polygon":
        raise PlanningError(f"expected a Polygon geometry, got {geom.get('type')!r}")
    rings = geom.get("coordinates", [])
    if not rings:
        raise PlanningError("polygon has no rings")
    if len(rings) > 1:
        raise PlanningError("polygons with holes are not supported")
    ring = rings[0]
    if len(ring) >= 2 and ring[0] == ring[-1]:
        ring = ring[:-1]
    return SurveyPolygon([GeoPoint(lat=c[1], lon=c[0]) for c in ring])


def export_waypoints(plan: CoveragePlan) -> dict:
    """Waypoint GeoJSON FeatureCollection: one Point per waypoint plus the
    full path LineString. Coordinates to 6 decimals, meters to 2."""
    features = []
    path_coords = []
    for order, (p, action) in enumerate(plan.waypoints):
        coord = [round(p.lon, 6), round(p.lat, 6)]
        path_coords.append(coord)
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": coord},
                "properties": {
                    "order": order,
                    "action": action,
                    "altitude_agl_m": round(plan.altitude_agl, 2),
                    "trigger_distance_m": round(plan.trigger_distance, 2),
                },
            }
        )
    features.append(
        {
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": path_coords},
            "properties": {"name": "flight_path"},
        }
    )
    return {"type": "FeatureCollection", "features": features}


def export_waypoints_json(plan: CoveragePlan) -> str:
    return json.dumps(export_waypoints(plan), indent=2) + "\n"

"""Terrain change analytics: profiles, epoch differencing, hazard zones,
standoff buffers, and revisit cadence.

Sign convention, used everywhere: delta = later epoch minus earlier epoch,
so receding water shows up as negative deltas; a "drop" is reported as a
positive magnitude.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geodesy import EnuPoint, GeoPoint, MissionOrigin, enu_to_wgs84, wgs84_to_enu
from .raster import DemGrid, RasterError, _bilinear_arrays, resample_onto, sample_bilinear


class AnalyticsError(ValueError):
    pass


# --- elevation profiles ----------------------------------------------------


@dataclass(frozen=True)
class ProfileLine:
    vertices: tuple[GeoPoint, ...]
    label: str = ""

    def __init__(self, vertices, label=""):
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "label", label)
        if len(self.vertices) < 2:
            raise AnalyticsError("profile line needs at least 2 vertices")


@dataclass
class ProfileStation:
    distance_m: float
    east: float
    north: float
    elevation_m: float | None  # None = nodata


@dataclass
class ElevationProfile:
    stations: list[ProfileStation]
    epoch_id: str
    step_m: float
    label: str = ""
    all_nodata: bool = False

    @property
    def distances(self) -> np.ndarray:
        return np.asarray([s.distance_m for s in self.stations])

    @property
    def elevations(self) -> np.ndarray:
        return np.asarray(
            [np.nan if s.elevation_m is None else s.elevation_m for s in self.stations]
        )


def _station_distances(seg_lengths: list[float], step_m: float) -> list[float]:
    """Cumulative distances every step plus every vertex, deduplicated."""
    total = sum(seg_lengths)
    by_key: dict[float, float] = {0.0: 0.0}
    k = 1
    while k * step_m < total - 1e-9:
        by_key.setdefault(round(k * step_m, 9), k * step_m)
        k += 1
    cum = 0.0
    for L in seg_lengths:
        cum += L
        by_key[round(cum, 9)] = cum  # vertices win ties so distances stay exact
    return sorted(by_key.values())


def extract_profile(
    grid: DemGrid,
    line: ProfileLine,
    origin: MissionOrigin,
    step_m: float | None = None,
    epoch_id: str | None = None,
) -> ElevationProfile:
    """Sample the DEM along a polyline at fixed steps plus every vertex."""
    if step_m is None:
        step_m = grid.cell_size / 2.0
    if step_m <= 0:
        raise AnalyticsError("profile step must be positive")
    verts = [wgs84_to_enu(p, origin) for p in line.vertices]
    seg_lengths = []
    for a, b in zip(verts, verts[1:]):
        L = math.hypot(b.east - a.east, b.north - a.north)
        if L <= 0:
            raise AnalyticsError("consecutive profile vertices must be distinct")
        seg_lengths.append(L)

    cum = np.concatenate([[0.0], np.cumsum(seg_lengths)])
    stations = []
    for d in _station_distances(seg_lengths, step_m):
        i = min(int(np.searchsorted(cum, d, side="right")) - 1, len(seg_lengths) - 1)
        t = (d - cum[i]) / seg_lengths[i]
        a, b = verts[i], verts[i + 1]
        e = a.east + t * (b.east - a.east)
        n = a.north + t * (b.north - a.north)
        z = sample_bilinear(grid, e, n)
        stations.append(
            ProfileStation(d, e, n, None if z == grid.nodata else z)
        )
    all_nodata = all(s.elevation_m is None for s in stations)
    return ElevationProfile(
        stations=stations,
        epoch_id=epoch_id if epoch_id is not None else grid.epoch_id,
        step_m=step_m,
        label=line.label,
        all_nodata=all_nodata,
    )


@dataclass
class ProfileComparison:
    distances: np.ndarray
    deltas: np.ndarray  # NaN where either profile has no data
    mean_delta_m: float
    min_delta_m: float
    max_delta_m: float


def compare_profiles(a: ElevationProfile, b: ElevationProfile) -> ProfileComparison:
    """Per-station deltas b - a; both profiles must share their stations."""
    da, db = a.distances, b.distances
    if len(da) != len(db) or not np.allclose(da, db, atol=1e-6):
        raise AnalyticsError(
            "profiles have different stations; re-extract both on a common line and step"
        )
    deltas = b.elevations - a.elevations
    valid = ~np.isnan(deltas)
    if valid.any():
        mean_d = float(deltas[valid].mean())
        min_d = float(deltas[valid].min())
        max_d = float(deltas[valid].max())
    else:
        mean_d = min_d = max_d = float("nan")
    return ProfileComparison(da, deltas, mean_d, min_d, max_d)


def write_profile_csv(profile: ElevationProfile, origin: MissionOrigin, path) -> None:
    """CSV per docs/formats.md: 6-decimal lat/lon, 3-decimal meters,
    nodata as an empty field."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["station_m", "lat", "lon", "elev_m"])
        for s in profile.stations:
            g = enu_to_wgs84(EnuPoint(s.east, s.north), origin)
            elev = "" if s.elevation_m is None else f"{s.elevation_m:.3f}"
            w.writerow([f"{s.distance_m:.3f}", f"{g.lat:.6f}", f"{g.lon:.6f}", elev])


# --- epoch differencing ----------------------------------------------------


@dataclass
class ChangeReport:
    epoch_a: str
    epoch_b: str
    mean_delta_m: float
    median_delta_m: float
    p05_delta_m: float
    max_drop_m: float  # largest recession, positive magnitude
    area_exceeding_m2: float
    threshold_m: float
    valid_cell_fraction: float

    def to_dict(self) -> dict:
        return {
            "epoch_a": self.epoch_a,
            "epoch_b": self.epoch_b,
            "mean_delta_m": round(self.mean_delta_m, 4),
            "median_delta_m": round(self.median_delta_m, 4),
            "p05_delta_m": round(self.p05_delta_m, 4),
            "max_drop_m": round(self.max_drop_m, 4),
            "area_exceeding_m2": round(self.area_exceeding_m2, 2),
            "threshold_m": self.threshold_m,
            "valid_cell_fraction": round(self.valid_cell_fraction, 4),
        }


def diff_dem(a: DemGrid, b: DemGrid, threshold: float = 0.2) -> tuple[DemGrid, ChangeReport]:
    """Per-cell delta grid (b - a) plus summary statistics.

    If the grids' geometries differ, b is bilinearly resampled onto a's.
    """
    if not b.same_geometry(a):
        b = resample_onto(b, a)
    valid = a.valid_mask & b.valid_mask
    deltas = np.where(valid, b.values - a.values, a.nodata)
    diff = DemGrid(
        a.origin_east,
        a.origin_north,
        a.cell_size,
        deltas,
        nodata=a.nodata,
        epoch_id=f"{a.epoch_id}->{b.epoch_id}" if a.epoch_id or b.epoch_id else "",
    )
    vals = deltas[valid]
    if len(vals) == 0:
        raise AnalyticsError("epochs share no valid cells")
    drops = -vals
    report = ChangeReport(
        epoch_a=a.epoch_id,
        epoch_b=b.epoch_id,
        mean_delta_m=float(vals.mean()),
        median_delta_m=float(np.median(vals)),
        p05_delta_m=float(np.percentile(vals, 5)),
        max_drop_m=float(max(0.0, drops.max())),
        area_exceeding_m2=float(a.cell_size**2 * np.count_nonzero(drops >= threshold)),
        threshold_m=threshold,
        valid_cell_fraction=float(valid.mean()),
    )
    return diff, report


# --- hazard zones and standoff ---------------------------------------------


@dataclass
class HazardZone:
    polygon: list[tuple[float, float]]  # convex hull of member cell centers (ENU)
    cell_count: int
    peak_drop_m: float


@dataclass
class StandoffAdvisory:
    buffer_polygons: list[list[tuple[float, float]]]
    standoff_m: float


def convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Andrew's monotone chain; degenerate inputs collapse gracefully."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def detect_hazard_zones(
    diff: DemGrid, drop_threshold_m: float, min_cells: int = 4
) -> list[HazardZone]:
    """Connected regions (4-connectivity) of cells dropping at least the
    threshold; small components are discarded as reconstruction noise."""
    if drop_threshold_m <= 0:
        raise AnalyticsError("drop threshold must be positive")
    drops = np.where(diff.valid_mask, -diff.values, 0.0)
    mask = drops >= drop_threshold_m
    labels, n = ndimage.label(mask, structure=[[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    easts, norths = diff.cell_centers()
    zones = []
    for lbl in range(1, n + 1):
        rows, cols = np.nonzero(labels == lbl)
        if len(rows) < min_cells:
            continue
        centers = [(easts[c], norths[r]) for r, c in zip(rows, cols)]
        zones.append(
            HazardZone(
                polygon=convex_hull(centers),
                cell_count=len(rows),
                peak_drop_m=float(drops[rows, cols].max()),
            )
        )
    zones.sort(key=lambda z: -z.cell_count)
    return zones


def standoff_buffer(zones: list[HazardZone], standoff_m: float) -> StandoffAdvisory:
    """Buffer each zone by the standoff distance: convex hull of 16-point
    circles around every hull vertex. Conservative by construction (the
    16-gon's inscribed radius is standoff * cos(pi/16))."""
    if standoff_m <= 0:
        raise AnalyticsError("standoff distance must be positive")
    angles = np.arange(16) * (2.0 * math.pi / 16.0)
    buffers = []
    for zone in zones:
        pts = []
        for x, y in zone.polygon:
            pts.extend(
                (x + standoff_m * math.cos(a), y + standoff_m * math.sin(a)) for a in angles
            )
        buffers.append(convex_hull(pts))
    return StandoffAdvisory(buffer_polygons=buffers, standoff_m=standoff_m)


# --- recession rate and revisit cadence ------------------------------------

REVISIT_MIN_H = 0.25
REVISIT_MAX_H = 24.0


def estimate_recession_rate(report: ChangeReport, elapsed_h: float) -> float:
    """Water-level change rate in m/h, unsigned magnitude."""
    if elapsed_h <= 0:
        raise AnalyticsError("elapsed time must be positive")
    return abs(report.mean_delta_m) / elapsed_h


def recommend_revisit(rate_m_per_h: float, safety_budget_m: float = 0.05) -> float:
    """Hours until the expected change eats the safety budget, clamped to
    [0.25 h, 24 h]. Zero rate recommends the 24 h ceiling."""
    if rate_m_per_h < 0 or safety_budget_m <= 0:
        raise AnalyticsError("rate must be >= 0 and budget positive")
    if rate_m_per_h == 0:
        return REVISIT_MAX_H
    return min(REVISIT_MAX_H, max(REVISIT_MIN_H, safety_budget_m / rate_m_per_h))


# --- GeoJSON helpers -------------------------------------------------------


def parse_line_geojson(doc: dict) -> ProfileLine:
    geom = doc
    label = ""
    if doc.get("type") == "FeatureCollection":
        if not doc.get("features"):
            raise AnalyticsError("empty FeatureCollection")
        feat = doc["features"][0]
        label = (feat.get("properties") or {}).get("label", "")
        geom = feat.get("geometry", {})
    elif doc.get("type") == "Feature":
        label = (doc.get("properties") or {}).get("label", "")
        geom = doc.get("geometry", {})
    if geom.get("type") != "LineString":
        raise AnalyticsError(f"expected a LineString, got {geom.get('type')!r}")
    coords = geom.get("coordinates", [])
    return ProfileLine([GeoPoint(lat=c[1], lon=c[0]) for c in coords], label=label)


def zones_to_geojson(
    zones: list[HazardZone], advisory: StandoffAdvisory, origin: MissionOrigin
) -> dict:
    def ring(poly):
        coords = [
            [round(g.lon, 6), round(g.lat, 6)]
            for g in (enu_to_wgs84(EnuPoint(x, y), origin) for x, y in poly)
        ]
        if coords and coords[0] != coords[-1]:
            coords.append(coords[0])
        return coords

    features = []
    for zone in zones:
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring(zone.polygon)]},
                "properties": {
                    "kind": "hazard_zone",
                    "cell_count": zone.cell_count,
                    "peak_drop_m": round(zone.peak_drop_m, 3),
                },
            }
        )
    for poly in advisory.buffer_polygons:
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring(poly)]},
                "properties": {"kind": "standoff_buffer", "standoff_m": advisory.standoff_m},
            }
        )
    return {"type": "FeatureCollection", "features": features}

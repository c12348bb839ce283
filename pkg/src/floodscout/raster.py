"""Point-cloud rasterization and regular-grid DEM operations.

Grid conventions (documented once, used everywhere):
  - origin_east/origin_north is the lower-left *corner* of the grid;
  - cells are half-open intervals [x, x+c) x [y, y+c);
  - `values` is a (n_rows, n_cols) float array stored bottom-up: row 0 is
    the southernmost row (ESRI ASC files are written north-to-south and
    flipped on I/O);
  - for sampling, a cell's value sits at its center (corner + c/2);
  - missing data is exactly the `nodata` sentinel (default -9999).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

NODATA_DEFAULT = -9999.0


class RasterError(ValueError):
    pass


@dataclass
class PointCloud:
    """Georeferenced points in the mission's ENU frame, meters."""

    xyz: np.ndarray  # (n, 3) float array: east, north, up
    rejected: int = 0  # non-finite points dropped at ingest

    def __post_init__(self):
        self.xyz = np.asarray(self.xyz, dtype=float).reshape(-1, 3)
        if len(self.xyz) == 0:
            raise RasterError("point cloud is empty")

    @classmethod
    def from_points(cls, pts) -> "PointCloud":
        arr = np.asarray(
            [(p.east, p.north, p.up) if hasattr(p, "east") else tuple(p) for p in pts],
            dtype=float,
        )
        finite = np.isfinite(arr).all(axis=1)
        if not finite.all():
            arr = arr[finite]
        if len(arr) == 0:
            raise RasterError("no finite points in cloud")
        return cls(arr, rejected=int((~finite).sum()))


@dataclass
class DemGrid:
    origin_east: float
    origin_north: float
    cell_size: float
    values: np.ndarray  # (n_rows, n_cols), bottom-up
    nodata: float = NODATA_DEFAULT
    epoch_id: str = ""
    captured_at: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise RasterError("grid values must be 2-D")
        if self.cell_size <= 0:
            raise RasterError("cell size must be positive")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def valid_mask(self) -> np.ndarray:
        return self.values != self.nodata

    def valid_fraction(self) -> float:
        return float(self.valid_mask.mean())

    def same_geometry(self, other: "DemGrid", tol: float = 1e-9) -> bool:
        return (
            self.values.shape == other.values.shape
            and abs(self.origin_east - other.origin_east) <= tol
            and abs(self.origin_north - other.origin_north) <= tol
            and abs(self.cell_size - other.cell_size) <= tol
        )

    def cell_centers(self):
        """(east, north) 1-D coordinate arrays of column / row centers."""
        c = self.cell_size
        easts = self.origin_east + (np.arange(self.n_cols) + 0.5) * c
        norths = self.origin_north + (np.arange(self.n_rows) + 0.5) * c
        return easts, norths


def rasterize(cloud: PointCloud, cell_size: float, agg: str = "mean") -> DemGrid:
    """Bin points into a grid aligned to whole cells; empty cells -> nodata."""
    if cell_size <= 0:
        raise RasterError("cell size must be positive")
    if agg not in ("mean", "max", "min"):
        raise RasterError(f"unknown aggregation {agg!r}")
    x, y, z = cloud.xyz.T
    origin_e = math.floor(x.min() / cell_size) * cell_size
    origin_n = math.floor(y.min() / cell_size) * cell_size
    col = np.floor((x - origin_e) / cell_size).astype(int)
    row = np.floor((y - origin_n) / cell_size).astype(int)
    n_cols = int(col.max()) + 1
    n_rows = int(row.max()) + 1
    flat = row * n_cols + col

    if agg == "mean":
        sums = np.zeros(n_rows * n_cols)
        counts = np.zeros(n_rows * n_cols)
        np.add.at(sums, flat, z)
        np.add.at(counts, flat, 1.0)
        with np.errstate(invalid="ignore"):
            vals = np.where(counts > 0, sums / np.maximum(counts, 1.0), NODATA_DEFAULT)
    else:
        fill = -np.inf if agg == "max" else np.inf
        vals = np.full(n_rows * n_cols, fill)
        ufunc = np.maximum if agg == "max" else np.minimum
        ufunc.at(vals, flat, z)
        vals = np.where(np.isfinite(vals), vals, NODATA_DEFAULT)

    return DemGrid(origin_e, origin_n, cell_size, vals.reshape(n_rows, n_cols))


def fill_voids(grid: DemGrid, radius: float, min_neighbors: int = 3) -> DemGrid:
    """Inverse-distance-squared fill of nodata cells, single pass.

    Only cells with at least `min_neighbors` valid cells within `radius`
    (center to center) are filled; valid cells are never touched and fills
    never chain off each other.
    """
    if radius <= 0:
        raise RasterError("fill radius must be positive")
    if min_neighbors < 1:
        raise RasterError("min_neighbors must be >= 1")
    c = grid.cell_size
    reach = int(math.floor(radius / c + 1e-9))
    if reach == 0:
        return replace(grid, values=grid.values.copy())

    valid = grid.valid_mask
    vals = np.where(valid, grid.values, 0.0)
    wsum = np.zeros_like(vals)
    vsum = np.zeros_like(vals)
    nsum = np.zeros(vals.shape, dtype=int)
    nr, nc = vals.shape
    for di in range(-reach, reach + 1):
        for dj in range(-reach, reach + 1):
            if di == 0 and dj == 0:
                continue
            dist = math.hypot(di, dj) * c
            if dist > radius + 1e-9:
                continue
            w = 1.0 / dist**2
            src_i = slice(max(0, di), nr + min(0, di))
            src_j = slice(max(0, dj), nc + min(0, dj))
            dst_i = slice(max(0, -di), nr + min(0, -di))
            dst_j = slice(max(0, -dj), nc + min(0, -dj))
            m = valid[src_i, src_j]
            wsum[dst_i, dst_j] += w * m
            vsum[dst_i, dst_j] += w * vals[src_i, src_j] * m
            nsum[dst_i, dst_j] += m

    fillable = (~valid) & (nsum >= min_neighbors) & (wsum > 0)
    out = grid.values.copy()
    out[fillable] = vsum[fillable] / wsum[fillable]
    return replace(grid, values=out)


def _bilinear_arrays(grid: DemGrid, east: np.ndarray, north: np.ndarray) -> np.ndarray:
    """Vectorized bilinear sampling; returns nodata where undefined."""
    east = np.asarray(east, dtype=float)
    north = np.asarray(north, dtype=float)
    c = grid.cell_size
    out = np.full(east.shape, grid.nodata)

    in_bounds = (
        (east >= grid.origin_east)
        & (east <= grid.origin_east + grid.n_cols * c)
        & (north >= grid.origin_north)
        & (north <= grid.origin_north + grid.n_rows * c)
    )
    if not in_bounds.any():
        return out

    fx = (east - grid.origin_east) / c - 0.5
    fy = (north - grid.origin_north) / c - 0.5
    j0 = np.clip(np.floor(fx).astype(int), 0, grid.n_cols - 1)
    i0 = np.clip(np.floor(fy).astype(int), 0, grid.n_rows - 1)
    j1 = np.clip(j0 + 1, 0, grid.n_cols - 1)
    i1 = np.clip(i0 + 1, 0, grid.n_rows - 1)
    tx = np.clip(fx - j0, 0.0, 1.0)
    ty = np.clip(fy - i0, 0.0, 1.0)

    corners = np.stack(
        [grid.values[i0, j0], grid.values[i0, j1], grid.values[i1, j0], grid.values[i1, j1]]
    )
    cvalid = corners != grid.nodata
    weights = np.stack(
        [(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty]
    )

    all_valid = cvalid.all(axis=0) & in_bounds
    out[all_valid] = (corners * weights).sum(axis=0)[all_valid]

    # Partially valid: take the nearest valid corner (by in-cell distance).
    some_valid = cvalid.any(axis=0) & ~cvalid.all(axis=0) & in_bounds
    if some_valid.any():
        d2 = np.stack(
            [
                tx**2 + ty**2,
                (1 - tx) ** 2 + ty**2,
                tx**2 + (1 - ty) ** 2,
                (1 - tx) ** 2 + (1 - ty) ** 2,
            ]
        )
        d2 = np.where(cvalid, d2, np.inf)
        pick = d2.argmin(axis=0)
        out[some_valid] = np.take_along_axis(corners, pick[None, ...], axis=0)[0][some_valid]
    return out


def sample_bilinear(grid: DemGrid, east: float, north: float) -> float:
    """Bilinear elevation at a point; returns the grid's nodata when the
    query is outside the grid or all four corners are missing."""
    return float(_bilinear_arrays(grid, np.asarray([east]), np.asarray([north]))[0])


def resample_onto(source: DemGrid, target_geometry: DemGrid) -> DemGrid:
    """Bilinearly resample `source` onto the geometry of `target_geometry`."""
    t = target_geometry
    se0, se1 = source.origin_east, source.origin_east + source.n_cols * source.cell_size
    sn0, sn1 = source.origin_north, source.origin_north + source.n_rows * source.cell_size
    te0, te1 = t.origin_east, t.origin_east + t.n_cols * t.cell_size
    tn0, tn1 = t.origin_north, t.origin_north + t.n_rows * t.cell_size
    if se1 <= te0 or te1 <= se0 or sn1 <= tn0 or tn1 <= sn0:
        raise RasterError("source and target grids do not overlap")
    easts, norths = t.cell_centers()
    ee, nn = np.meshgrid(easts, norths)
    vals = _bilinear_arrays(source, ee, nn)
    return DemGrid(
        t.origin_east,
        t.origin_north,
        t.cell_size,
        vals,
        nodata=source.nodata,
        epoch_id=source.epoch_id,
        captured_at=source.captured_at,
    )


# --- ESRI ASCII grid I/O ---------------------------------------------------


def write_asc(grid: DemGrid, path) -> None:
    """ESRI ASCII grid, values with 3 decimals, rows north to south."""
    with open(path, "w") as f:
        f.write(f"ncols {grid.n_cols}\n")
        f.write(f"nrows {grid.n_rows}\n")
        f.write(f"xllcorner {grid.origin_east:.3f}\n")
        f.write(f"yllcorner {grid.origin_north:.3f}\n")
        f.write(f"cellsize {grid.cell_size:g}\n")
        f.write(f"NODATA_value {grid.nodata:g}\n")
        for row in grid.values[::-1]:
            f.write(" ".join(f"{v:.3f}" for v in row) + "\n")


def read_asc(path) -> DemGrid:
    header: dict[str, float] = {}
    rows: list[list[float]] = []
    keys = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if parts[0].lower() in keys and len(header) < 6 and not rows:
                try:
                    header[parts[0].lower()] = float(parts[1])
                except (IndexError, ValueError):
                    raise RasterError(f"{path}: malformed header at line {lineno}") from None
                continue
            try:
                rows.append([float(v) for v in parts])
            except ValueError:
                raise RasterError(f"{path}: unparseable data at line {lineno}") from None
    for req in ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize"):
        if req not in header:
            raise RasterError(f"{path}: missing header key {req}")
    n_cols, n_rows = int(header["ncols"]), int(header["nrows"])
    if len(rows) != n_rows:
        raise RasterError(f"{path}: expected {n_rows} data rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise RasterError(
                f"{path}: row at line {i + 7} has {len(row)} values, expected {n_cols}"
            )
    values = np.asarray(rows)[::-1]
    return DemGrid(
        header["xllcorner"],
        header["yllcorner"],
        header["cellsize"],
        values,
        nodata=header.get("nodata_value", NODATA_DEFAULT),
    )


# --- hillshade -------------------------------------------------------------


@dataclass
class HillshadeImage:
    origin_east: float
    origin_north: float
    cell_size: float
    values: np.ndarray  # (n_rows, n_cols) uint8, bottom-up


def render_hillshade(grid: DemGrid, azimuth: float = 315.0, sun_alt: float = 45.0) -> HillshadeImage:
    """Horn slope/aspect hillshade; border and nodata-adjacent cells are 0."""
    if grid.n_rows < 3 or grid.n_cols < 3:
        raise RasterError("hillshade needs a grid of at least 3x3 cells")
    z = grid.values
    c = grid.cell_size
    valid = grid.valid_mask

    # Horn 3x3 gradient (bottom-up storage: row+1 is the northern neighbor).
    sw, s_, se = z[:-2, :-2], z[:-2, 1:-1], z[:-2, 2:]
    w_, e_ = z[1:-1, :-2], z[1:-1, 2:]
    nw, n_, ne = z[2:, :-2], z[2:, 1:-1], z[2:, 2:]
    gx = ((ne + 2 * e_ + se) - (nw + 2 * w_ + sw)) / (8 * c)
    gy = ((ne + 2 * n_ + nw) - (se + 2 * s_ + sw)) / (8 * c)

    alt = math.radians(sun_alt)
    az = math.radians(azimuth)
    sun = np.array([math.sin(az) * math.cos(alt), math.cos(az) * math.cos(alt), math.sin(alt)])
    norm = np.sqrt(1.0 + gx**2 + gy**2)
    intensity = (-gx * sun[0] - gy * sun[1] + sun[2]) / norm
    shade = np.rint(255.0 * np.clip(intensity, 0.0, 1.0)).astype(np.uint8)

    ok = np.ones_like(valid[1:-1, 1:-1])
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            ok &= valid[1 + di : valid.shape[0] - 1 + di, 1 + dj : valid.shape[1] - 1 + dj]
    out = np.zeros(z.shape, dtype=np.uint8)
    out[1:-1, 1:-1] = np.where(ok, shade, 0)
    return HillshadeImage(grid.origin_east, grid.origin_north, grid.cell_size, out)


def write_hillshade_png(img: HillshadeImage, path) -> None:
    from PIL import Image

    # PNG rows top-down; internal storage is bottom-up.
    Image.fromarray(img.values[::-1], mode="L").save(path, format="PNG")


# --- .xyz point cloud I/O --------------------------------------------------


def read_xyz(path, origin=None) -> PointCloud:
    """ASCII point cloud, one `x y z` per line, `#` comments.

    A `#crs wgs84` first directive marks lines as `lat lon alt`;
    `#crs enu lat0 lon0 alt0` carries the frame anchor inline. Default is
    ENU in the caller-supplied mission origin.
    """
    from .geodesy import GeoPoint, MissionOrigin, wgs84_to_enu

    crs = "enu"
    inline_origin = None
    pts = []
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("crs"):
                    parts = body.split()
                    if parts[1] == "wgs84":
                        crs = "wgs84"
                    elif parts[1] == "enu":
                        crs = "enu"
                        if len(parts) >= 4:
                            inline_origin = MissionOrigin(
                                GeoPoint(
                                    float(parts[2]),
                                    float(parts[3]),
                                    float(parts[4]) if len(parts) > 4 else 0.0,
                                )
                            )
                continue
            parts = line.split()
            if len(parts) < 3:
                raise RasterError(f"{path}: line {lineno}: expected `x y z`")
            try:
                pts.append((float(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                raise RasterError(f"{path}: line {lineno}: unparseable number") from None
    if not pts:
        raise RasterError(f"{path}: no points")
    if crs == "wgs84":
        if origin is None:
            raise RasterError("wgs84 cloud needs a mission origin")
        enu = [wgs84_to_enu(GeoPoint(lat, lon, alt), origin) for lat, lon, alt in pts]
        return PointCloud.from_points(enu)
    return PointCloud.from_points(pts)


def write_xyz(cloud: PointCloud, path, header_lines=()) -> None:
    with open(path, "w") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        for x, y, z in cloud.xyz:
            f.write(f"{x:.3f} {y:.3f} {z:.3f}\n")

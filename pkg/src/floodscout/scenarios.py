"""Synthetic terrains and epoch pairs with known ground truth.

Everything here is deterministic given its seed; the rest of the test
suite leans on that to compare pipeline output against analytic surfaces.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import Polygon

from .raster import PointCloud


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class TerrainSpec:
    """Analytic test terrain over a rectangular extent anchored at (0, 0)."""

    kind: str  # flat | plane | valley
    extent: tuple[float, float]
    z0: float = 0.0
    gx: float = 0.0  # plane gradient, m per m east
    gy: float = 0.0  # plane gradient, m per m north
    depth: float = 0.0  # valley depth
    width: float = 1.0  # valley half-width
    axis: str = "east"  # valley runs along this axis

    def __post_init__(self):
        if self.kind not in ("flat", "plane", "valley"):
            raise ScenarioError(f"unknown terrain kind {self.kind!r}")
        if self.extent[0] <= 0 or self.extent[1] <= 0:
            raise ScenarioError("extent must be positive")

    def elevation(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "flat":
            return np.full(np.broadcast(x, y).shape, self.z0)
        if self.kind == "plane":
            return self.z0 + self.gx * x + self.gy * y
        # V-shaped valley along one axis, floor z0 - depth at the centerline
        across = y - self.extent[1] / 2.0 if self.axis == "east" else x - self.extent[0] / 2.0
        t = np.clip(np.abs(across) / self.width, 0.0, 1.0)
        return self.z0 - self.depth * (1.0 - t)


@dataclass(frozen=True)
class EpochPairSpec:
    terrain: TerrainSpec
    water_level_a: float
    water_level_b: float
    water_region: tuple[tuple[float, float], ...]  # ENU polygon
    point_density: float = 10.0  # points per square meter
    noise_sigma: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.point_density <= 0:
            raise ScenarioError("point density must be positive")
        if self.noise_sigma < 0:
            raise ScenarioError("noise sigma must be non-negative")


def sample_terrain(
    spec: TerrainSpec, density: float, noise_sigma: float = 0.0, seed: int = 0
) -> PointCloud:
    """Uniform random surface samples, z = terrain + gaussian noise."""
    rng = np.random.default_rng(seed)
    ex, ey = spec.extent
    n = max(1, int(round(density * ex * ey)))
    x = rng.uniform(0.0, ex, n)
    y = rng.uniform(0.0, ey, n)
    z = spec.elevation(x, y)
    if noise_sigma > 0:
        z = z + rng.normal(0.0, noise_sigma, n)
    return PointCloud(np.column_stack([x, y, z]))


def make_epoch_pair(spec: EpochPairSpec) -> tuple[PointCloud, PointCloud]:
    """Two epochs of the same terrain with a flat water surface clamped
    over it inside the region: z = max(terrain, level). Point positions and
    noise are shared between epochs so the only difference is the level."""
    import shapely

    rng = np.random.default_rng(spec.seed)
    ex, ey = spec.terrain.extent
    n = max(1, int(round(spec.point_density * ex * ey)))
    x = rng.uniform(0.0, ex, n)
    y = rng.uniform(0.0, ey, n)
    noise = rng.normal(0.0, spec.noise_sigma, n) if spec.noise_sigma > 0 else 0.0
    ground = spec.terrain.elevation(x, y)
    region = Polygon(spec.water_region)
    wet = shapely.contains_xy(region, x, y)

    def epoch(level: float) -> PointCloud:
        z = np.where(wet, np.maximum(ground, level), ground) + noise
        return PointCloud(np.column_stack([x, y, z]))

    return epoch(spec.water_level_a), epoch(spec.water_level_b)


# --- presets ---------------------------------------------------------------


def blessem_breach_preset(drop: float = 0.40, seed: int = 7) -> EpochPairSpec:
    """Flooded 150x150 m area with a flat water surface over low terrain;
    the second epoch's level sits `drop` meters lower."""
    extent = (150.0, 150.0)
    region = ((-1.0, -1.0), (151.0, -1.0), (151.0, 151.0), (-1.0, 151.0))
    return EpochPairSpec(
        terrain=TerrainSpec(kind="flat", extent=extent, z0=5.0),
        water_level_a=10.0,
        water_level_b=10.0 - drop,
        water_region=region,
        point_density=10.0,
        noise_sigma=0.02,
        seed=seed,
    )


PRESETS = {"blessem-breach": blessem_breach_preset}


def ground_truth_dict(spec: EpochPairSpec) -> dict:
    return {
        "true_delta_m": round(spec.water_level_b - spec.water_level_a, 6),
        "water_level_a_m": spec.water_level_a,
        "water_level_b_m": spec.water_level_b,
        "water_region_enu": [list(p) for p in spec.water_region],
        "point_density_per_m2": spec.point_density,
        "noise_sigma_m": spec.noise_sigma,
        "seed": spec.seed,
    }

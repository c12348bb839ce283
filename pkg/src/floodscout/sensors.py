"""Camera footprint and ground sampling distance for nadir survey flights.

Ideal pinhole model, gimbal pointing straight down, flat ground at constant
altitude AGL. The built-in catalog ships the four mission cameras; entries
whose field of view had to be assumed are flagged ``assumed = true`` in the
catalog file (see docs/formats.md).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources


class SensorError(ValueError):
    pass


@dataclass(frozen=True)
class CameraSpec:
    name: str
    res_x: int
    res_y: int
    hfov_deg: float
    assumed: bool = False

    def __post_init__(self):
        if self.res_x < 1 or self.res_y < 1:
            raise SensorError("resolution must be at least 1x1 px")
        if not (0.0 < self.hfov_deg < 180.0):
            raise SensorError(f"horizontal FOV {self.hfov_deg} outside (0, 180)")


@dataclass(frozen=True)
class FootprintDims:
    """Ground rectangle imaged by one nadir photo, meters.

    ``width`` is across-track, ``height`` along-track.
    """

    width: float
    height: float


def vfov(camera: CameraSpec) -> float:
    """Vertical FOV in degrees from the pinhole aspect-ratio relation."""
    half_h = math.radians(camera.hfov_deg / 2.0)
    return math.degrees(2.0 * math.atan(math.tan(half_h) * camera.res_y / camera.res_x))


def footprint(camera: CameraSpec, altitude_agl: float) -> FootprintDims:
    """Ground footprint at ``altitude_agl`` meters above ground."""
    if altitude_agl <= 0:
        raise SensorError("altitude AGL must be positive")
    w = 2.0 * altitude_agl * math.tan(math.radians(camera.hfov_deg / 2.0))
    h = 2.0 * altitude_agl * math.tan(math.radians(vfov(camera) / 2.0))
    return FootprintDims(width=w, height=h)


def gsd(camera: CameraSpec, altitude_agl: float) -> float:
    """Ground sampling distance in meters per pixel (across-track)."""
    return footprint(camera, altitude_agl).width / camera.res_x


# --- catalog ---------------------------------------------------------------


def parse_catalog(text: str) -> dict[str, CameraSpec]:
    """Parse the ``cameras.toml`` sectioned key/value catalog format."""
    cameras: dict[str, CameraSpec] = {}
    section = None
    fields: dict[str, str] = {}

    def flush():
        if section is None:
            return
        try:
            cameras[section] = CameraSpec(
                name=section,
                res_x=int(fields["res_x"]),
                res_y=int(fields["res_y"]),
                hfov_deg=float(fields["hfov_deg"]),
                assumed=fields.get("assumed", "false").lower() == "true",
            )
        except KeyError as e:
            raise SensorError(f"catalog section [{section}] missing key {e}") from None

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            flush()
            section = line[1:-1].strip().strip('"')
            fields = {}
        elif "=" in line:
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip().strip('"')
        else:
            raise SensorError(f"malformed catalog line: {raw!r}")
    flush()
    return cameras


def load_catalog(path=None) -> dict[str, CameraSpec]:
    """Load a camera catalog file, defaulting to the built-in one."""
    if path is None:
        text = resources.files("floodscout").joinpath("data/cameras.toml").read_text()
    else:
        with open(path) as f:
            text = f.read()
    return parse_catalog(text)


def get_camera(name: str, path=None) -> CameraSpec:
    catalog = load_catalog(path)
    key = name.lower()
    if key not in catalog:
        raise SensorError(f"unknown camera {name!r}; catalog has: {', '.join(sorted(catalog))}")
    return catalog[key]

"""File-based mission persistence and the automated mission report.

One directory per mission holding a JSON manifest plus product files; no
database. Manifest writes go through write-to-temp-then-rename so a hard
power loss never leaves a half-written manifest, and a lock file enforces
the single-writer-per-mission contract. Schema: docs/manifest.md.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import analytics, coverage, raster
from .geodesy import GeoPoint, MissionOrigin

RISKS = ("low", "medium", "high")
STATUSES = ("open", "inspected", "inaccessible")
ALLOWED_TRANSITIONS = {"open": {"inspected", "inaccessible"}}

DEFAULT_CELL_SIZE = 0.25


class StoreError(Exception):
    pass


class NotFoundError(StoreError):
    pass


class ConflictError(StoreError):
    pass


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _slug(name: str) -> str:
    s = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    if not s:
        raise StoreError("mission name must contain at least one alphanumeric character")
    return s


@dataclass
class EpochRecord:
    epoch_id: str
    captured_at: str
    cloud_path: str
    dem_path: str
    hillshade_path: str
    point_count: int
    valid_cell_fraction: float


@dataclass
class InspectionPoint:
    id: str
    lat: float
    lon: float
    risk: str
    status: str
    note: str
    created_at: str
    updated_at: str
    audit: list = field(default_factory=list)


@dataclass
class Mission:
    id: str
    name: str
    created_at: str
    origin: dict  # {lat, lon, alt}
    survey_polygon: list | None = None  # [[lat, lon], ...]
    epochs: list = field(default_factory=list)
    inspection_points: list = field(default_factory=list)
    plans: list = field(default_factory=list)

    @property
    def mission_origin(self) -> MissionOrigin:
        o = self.origin
        return MissionOrigin(GeoPoint(o["lat"], o["lon"], o.get("alt", 0.0)))


class MissionStore:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        (self.root / "missions").mkdir(parents=True, exist_ok=True)

    # --- paths and manifest I/O -------------------------------------------

    def mission_dir(self, mission_id: str) -> Path:
        return self.root / "missions" / mission_id

    def _manifest_path(self, mission_id: str) -> Path:
        return self.mission_dir(mission_id) / "manifest.json"

    @contextmanager
    def _lock(self, mission_id: str, timeout: float = 10.0):
        path = self.mission_dir(mission_id) / ".lock"
        deadline = time.monotonic() + timeout
        while True:
            try:
                fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                break
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise StoreError(f"mission {mission_id} is locked by another writer")
                time.sleep(0.05)
        try:
            yield
        finally:
            os.close(fd)
            os.unlink(path)

    def _save(self, mission: Mission) -> None:
        path = self._manifest_path(mission.id)
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w") as f:
            json.dump(asdict(mission), f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)

    def _load(self, mission_id: str) -> Mission:
        path = self._manifest_path(mission_id)
        if not path.exists():
            raise NotFoundError(f"no mission {mission_id!r}")
        with open(path) as f:
            data = json.load(f)
        return Mission(**data)

    # --- mission CRUD ------------------------------------------------------

    def create_mission(
        self, name: str, origin: GeoPoint, survey_polygon=None, created_at: str | None = None
    ) -> Mission:
        mission_id = _slug(name)
        mdir = self.mission_dir(mission_id)
        if mdir.exists():
            raise ConflictError(f"mission named {name!r} already exists")
        mdir.mkdir(parents=True)
        mission = Mission(
            id=mission_id,
            name=name,
            created_at=created_at or _now_iso(),
            origin={"lat": origin.lat, "lon": origin.lon, "alt": origin.alt},
            survey_polygon=(
                [[p.lat, p.lon] for p in survey_polygon.vertices] if survey_polygon else None
            ),
        )
        self._save(mission)
        return mission

    def get_mission(self, mission_id: str) -> Mission:
        return self._load(mission_id)

    def list_missions(self) -> list[Mission]:
        missions = []
        for d in (self.root / "missions").iterdir():
            if (d / "manifest.json").exists():
                missions.append(self._load(d.name))
        missions.sort(key=lambda m: (m.created_at, m.id))
        return missions

    # --- plans -------------------------------------------------------------

    def save_plan(self, mission_id: str, plan: coverage.CoveragePlan) -> dict:
        with self._lock(mission_id):
            mission = self._load(mission_id)
            path = self.mission_dir(mission_id) / "plan.geojson"
            with open(path, "w") as f:
                f.write(coverage.export_waypoints_json(plan))
            entry = {
                "path": "plan.geojson",
                "heading_deg": round(plan.heading_deg, 3),
                "trigger_distance_m": round(plan.trigger_distance, 3),
                "line_spacing_m": round(plan.line_spacing, 3),
                "stats": {
                    "total_path_m": round(plan.stats.total_path_m, 2),
                    "est_flight_s": round(plan.stats.est_flight_s, 1),
                    "photo_count": plan.stats.photo_count,
                    "line_count": plan.stats.line_count,
                    "est_gsd_m_per_px": round(plan.stats.est_gsd, 4),
                },
            }
            mission.plans = [entry]  # latest plan replaces the previous one
            self._save(mission)
        return entry

    # --- epochs ------------------------------------------------------------

    def register_epoch(
        self,
        mission_id: str,
        cloud_path,
        captured_at: str,
        epoch_id: str | None = None,
        cell_size: float = DEFAULT_CELL_SIZE,
        fill_radius: float | None = None,
        min_neighbors: int = 3,
    ) -> EpochRecord:
        """Ingest a point cloud: rasterize, fill voids, render hillshade,
        persist all products, and append the epoch to the manifest."""
        with self._lock(mission_id):
            mission = self._load(mission_id)
            if epoch_id is None:
                epoch_id = f"epoch-{len(mission.epochs) + 1:03d}"
            if any(e["epoch_id"] == epoch_id for e in mission.epochs):
                raise ConflictError(f"epoch {epoch_id!r} already registered")
            if mission.epochs and captured_at <= mission.epochs[-1]["captured_at"]:
                raise StoreError(
                    f"captured_at {captured_at} is not after the previous epoch "
                    f"({mission.epochs[-1]['captured_at']})"
                )

            cloud = raster.read_xyz(cloud_path, origin=mission.mission_origin)
            grid = raster.rasterize(cloud, cell_size)
            grid.epoch_id = epoch_id
            grid.captured_at = captured_at
            radius = fill_radius if fill_radius is not None else 3.0 * cell_size
            grid = raster.fill_voids(grid, radius, min_neighbors)
            shade = raster.render_hillshade(grid)

            edir = self.mission_dir(mission_id) / "epochs" / epoch_id
            edir.mkdir(parents=True)
            shutil.copy(cloud_path, edir / "cloud.xyz")
            raster.write_asc(grid, edir / "dem.asc")
            raster.write_hillshade_png(shade, edir / "hillshade.png")

            record = EpochRecord(
                epoch_id=epoch_id,
                captured_at=captured_at,
                cloud_path=f"epochs/{epoch_id}/cloud.xyz",
                dem_path=f"epochs/{epoch_id}/dem.asc",
                hillshade_path=f"epochs/{epoch_id}/hillshade.png",
                point_count=len(cloud.xyz),
                valid_cell_fraction=round(grid.valid_fraction(), 4),
            )
            mission.epochs.append(asdict(record))
            self._save(mission)
        return record

    def get_epoch(self, mission_id: str, epoch_id: str) -> EpochRecord:
        mission = self._load(mission_id)
        for e in mission.epochs:
            if e["epoch_id"] == epoch_id:
                return EpochRecord(**e)
        raise NotFoundError(f"no epoch {epoch_id!r} in mission {mission_id!r}")

    def load_dem(self, mission_id: str, epoch_id: str) -> raster.DemGrid:
        record = self.get_epoch(mission_id, epoch_id)
        grid = raster.read_asc(self.mission_dir(mission_id) / record.dem_path)
        grid.epoch_id = record.epoch_id
        grid.captured_at = record.captured_at
        return grid

    # --- inspection points --------------------------------------------------

    def add_inspection_point(
        self, mission_id: str, location: GeoPoint, risk: str, note: str = ""
    ) -> InspectionPoint:
        if risk not in RISKS:
            raise StoreError(f"risk must be one of {RISKS}")
        with self._lock(mission_id):
            mission = self._load(mission_id)
            now = _now_iso()
            point = InspectionPoint(
                id=f"ip-{len(mission.inspection_points) + 1:03d}",
                lat=location.lat,
                lon=location.lon,
                risk=risk,
                status="open",
                note=note,
                created_at=now,
                updated_at=now,
            )
            mission.inspection_points.append(asdict(point))
            self._save(mission)
        return point

    def _find_point(self, mission: Mission, point_id: str) -> dict:
        for p in mission.inspection_points:
            if p["id"] == point_id:
                return p
        raise NotFoundError(f"no inspection point {point_id!r}")

    def set_status(self, mission_id: str, point_id: str, status: str) -> InspectionPoint:
        if status not in STATUSES:
            raise StoreError(f"status must be one of {STATUSES}")
        with self._lock(mission_id):
            mission = self._load(mission_id)
            p = self._find_point(mission, point_id)
            if status != p["status"]:
                if status not in ALLOWED_TRANSITIONS.get(p["status"], set()):
                    raise ConflictError(
                        f"illegal status transition {p['status']} -> {status}"
                    )
                now = _now_iso()
                p["audit"].append(
                    {"at": now, "field": "status", "from": p["status"], "to": status, "note": ""}
                )
                p["status"] = status
                p["updated_at"] = now
                self._save(mission)
            return InspectionPoint(**p)

    def reassess_risk(
        self, mission_id: str, point_id: str, risk: str, note: str
    ) -> InspectionPoint:
        """Risk is immutable unless explicitly re-assessed with an audit note."""
        if risk not in RISKS:
            raise StoreError(f"risk must be one of {RISKS}")
        if not note.strip():
            raise StoreError("re-assessing risk requires an audit note")
        with self._lock(mission_id):
            mission = self._load(mission_id)
            p = self._find_point(mission, point_id)
            now = _now_iso()
            p["audit"].append(
                {"at": now, "field": "risk", "from": p["risk"], "to": risk, "note": note}
            )
            p["risk"] = risk
            p["updated_at"] = now
            self._save(mission)
            return InspectionPoint(**p)

    # --- report ------------------------------------------------------------

    def generate_report(
        self,
        mission_id: str,
        epoch_a: str,
        epoch_b: str,
        threshold: float = 0.2,
        standoff_m: float = 100.0,
        safety_budget_m: float = 0.05,
    ) -> tuple[str, dict]:
        """Deterministic mission report: markdown for humans plus a JSON
        sidecar for GIS ingestion. Same store state -> byte-identical output."""
        mission = self._load(mission_id)
        rec_a = self.get_epoch(mission_id, epoch_a)
        rec_b = self.get_epoch(mission_id, epoch_b)
        dem_a = self.load_dem(mission_id, epoch_a)
        dem_b = self.load_dem(mission_id, epoch_b)

        diff_grid, change = analytics.diff_dem(dem_a, dem_b, threshold=threshold)
        zones = analytics.detect_hazard_zones(diff_grid, drop_threshold_m=threshold)
        advisory = analytics.standoff_buffer(zones, standoff_m) if zones else None

        ta = datetime.fromisoformat(rec_a.captured_at.replace("Z", "+00:00"))
        tb = datetime.fromisoformat(rec_b.captured_at.replace("Z", "+00:00"))
        elapsed_h = (tb - ta).total_seconds() / 3600.0
        rate = analytics.estimate_recession_rate(change, elapsed_h) if elapsed_h > 0 else 0.0
        revisit_h = analytics.recommend_revisit(rate, safety_budget_m)

        mean_drop = -change.mean_delta_m

        sidecar = {
            "mission": {"id": mission.id, "name": mission.name, "created_at": mission.created_at},
            "plan": mission.plans[0] if mission.plans else None,
            "epochs": [asdict(rec_a), asdict(rec_b)],
            "change": change.to_dict(),
            "hazard_zones": [
                {"cell_count": z.cell_count, "peak_drop_m": round(z.peak_drop_m, 3)}
                for z in zones
            ],
            "standoff_m": standoff_m if advisory else None,
            "recession_rate_m_per_h": round(rate, 5),
            "elapsed_h": round(elapsed_h, 3),
            "revisit_interval_h": round(revisit_h, 2),
            "safety_budget_m": safety_budget_m,
            "inspection_points": {
                "total": len(mission.inspection_points),
                "open": sum(1 for p in mission.inspection_points if p["status"] == "open"),
            },
        }

        lines = [
            f"# Mission report: {mission.name}",
            "",
            f"Mission `{mission.id}`, created {mission.created_at}.",
            f"Comparing epoch `{epoch_a}` ({rec_a.captured_at}) against `{epoch_b}` ({rec_b.captured_at}).",
            "",
            "## Flight plan",
        ]
        if mission.plans:
            st = mission.plans[0]["stats"]
            lines += [
                f"- photos planned: {st['photo_count']}",
                f"- flight lines: {st['line_count']}",
                f"- estimated flight time: {st['est_flight_s']:.1f} s",
                f"- estimated GSD: {st['est_gsd_m_per_px']:.4f} m/px",
            ]
        else:
            lines.append("- no plan on file")
        lines += ["", "## Epochs"]
        for rec in (rec_a, rec_b):
            lines.append(
                f"- `{rec.epoch_id}` at {rec.captured_at}: {rec.point_count} points, "
                f"{rec.valid_cell_fraction:.1%} valid cells"
            )
        lines += [
            "",
            "## Surface change",
            f"- mean drop: {mean_drop:.3f} m (delta {change.mean_delta_m:.3f} m)",
            f"- median delta: {change.median_delta_m:.3f} m",
            f"- 5th percentile delta: {change.p05_delta_m:.3f} m",
            f"- max drop: {change.max_drop_m:.3f} m",
            f"- area dropping >= {threshold:.2f} m: {change.area_exceeding_m2:.1f} m2",
            "",
            "## Hazard assessment",
        ]
        if zones:
            lines.append(f"- {len(zones)} hazard zone(s) past the {threshold:.2f} m drop threshold")
            for i, z in enumerate(zones, start=1):
                lines.append(
                    f"  - zone {i}: {z.cell_count} cells, peak drop {z.peak_drop_m:.3f} m"
                )
            lines.append(f"- standoff advisory: keep {standoff_m:.0f} m clearance from all zones")
        else:
            lines.append("- no hazard zones past the threshold")
        lines += [
            "",
            "## Revisit cadence",
            f"- observed recession rate: {rate:.5f} m/h over {elapsed_h:.1f} h",
            f"- recommended revisit interval: {revisit_h:.1f} h (budget {safety_budget_m:.2f} m)",
            "",
            "## Inspection checklist",
        ]
        if mission.inspection_points:
            for risk in ("high", "medium", "low"):
                pts = [p for p in mission.inspection_points if p["risk"] == risk]
                if not pts:
                    continue
                lines.append(f"- {risk} risk:")
                for p in pts:
                    lines.append(
                        f"  - [{'x' if p['status'] != 'open' else ' '}] {p['id']} "
                        f"({p['lat']:.6f}, {p['lon']:.6f}) {p['status']}"
                        + (f" - {p['note']}" if p["note"] else "")
                    )
        else:
            lines.append("- none recorded")
        markdown = "\n".join(lines) + "\n"
        return markdown, sidecar

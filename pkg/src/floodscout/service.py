"""JSON-over-HTTP facade for the ops console and scripted clients.

Thin layer: every number in a response comes from the library modules, so
the console never recomputes analytics. Field-LAN trust model: CORS open,
no authentication.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi import FastAPI, File, Form, Query, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import analytics, coverage, raster, sensors, store
from .geodesy import GeoPoint


class OriginBody(BaseModel):
    lat: float
    lon: float
    alt: float = 0.0


class MissionBody(BaseModel):
    name: str
    origin: OriginBody
    survey_polygon: dict | None = None  # GeoJSON Polygon


class PlanBody(BaseModel):
    polygon: dict  # GeoJSON Polygon
    camera: str = "mz2"
    altitude_agl: float = 50.0
    side_overlap: float = 0.65
    front_overlap: float = 0.75
    heading: float | None = None
    cruise_speed: float = 5.0


class ProfilesBody(BaseModel):
    line: dict  # GeoJSON LineString
    epochs: list[str]
    step_m: float | None = None


class DiffBody(BaseModel):
    epoch_a: str
    epoch_b: str
    threshold: float = 0.2
    standoff: float = 100.0


class InspectionBody(BaseModel):
    lat: float
    lon: float
    risk: str
    note: str = ""


class InspectionUpdateBody(BaseModel):
    status: str | None = None
    risk: str | None = None
    note: str = ""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _profile_payload(profile: analytics.ElevationProfile) -> dict:
    return {
        "epoch_id": profile.epoch_id,
        "step_m": profile.step_m,
        "label": profile.label,
        "all_nodata": profile.all_nodata,
        "stations": [
            {
                "station_m": round(s.distance_m, 3),
                "east": round(s.east, 3),
                "north": round(s.north, 3),
                "elev_m": None if s.elevation_m is None else round(s.elevation_m, 3),
            }
            for s in profile.stations
        ],
    }


def create_app(data_dir) -> FastAPI:
    app = FastAPI(title="floodscout survey service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    st = store.MissionStore(data_dir)
    app.state.store = st

    @app.exception_handler(store.NotFoundError)
    async def _nf(request: Request, exc):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(store.ConflictError)
    async def _conflict(request: Request, exc):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(ValueError)
    async def _validation(request: Request, exc):
        return _error(422, "validation_error", str(exc))

    @app.exception_handler(store.StoreError)
    async def _store_err(request: Request, exc):
        return _error(422, "store_error", str(exc))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/missions", status_code=201)
    def create_mission(body: MissionBody):
        poly = coverage.parse_polygon_geojson(body.survey_polygon) if body.survey_polygon else None
        mission = st.create_mission(
            body.name, GeoPoint(body.origin.lat, body.origin.lon, body.origin.alt), poly
        )
        return mission

    @app.get("/missions")
    def list_missions():
        return st.list_missions()

    @app.get("/missions/{mission_id}")
    def get_mission(mission_id: str):
        return st.get_mission(mission_id)

    @app.post("/missions/{mission_id}/plan")
    def make_plan(mission_id: str, body: PlanBody):
        mission = st.get_mission(mission_id)
        poly = coverage.parse_polygon_geojson(body.polygon)
        cam = sensors.get_camera(body.camera)
        params = coverage.CoverageParams(
            altitude_agl=body.altitude_agl,
            side_overlap=body.side_overlap,
            front_overlap=body.front_overlap,
            heading=body.heading,
            cruise_speed=body.cruise_speed,
        )
        plan = coverage.plan_coverage(poly, cam, params, mission.mission_origin)
        entry = st.save_plan(mission_id, plan)
        return {
            "plan": entry,
            "waypoints": coverage.export_waypoints(plan),
        }

    @app.get("/missions/{mission_id}/plan.geojson")
    def plan_geojson(mission_id: str):
        mission = st.get_mission(mission_id)
        if not mission.plans:
            raise store.NotFoundError(f"mission {mission_id!r} has no plan")
        path = st.mission_dir(mission_id) / mission.plans[0]["path"]
        return JSONResponse(content=json.loads(path.read_text()))

    @app.post("/missions/{mission_id}/epochs", status_code=201)
    def add_epoch(
        mission_id: str,
        cloud: UploadFile = File(...),
        captured_at: str = Form(...),
        epoch_id: str | None = Form(None),
        cell_size: float = Form(store.DEFAULT_CELL_SIZE),
    ):
        with tempfile.NamedTemporaryFile(suffix=".xyz", delete=False) as tmp:
            tmp.write(cloud.file.read())
            tmp_path = tmp.name
        try:
            record = st.register_epoch(
                mission_id, tmp_path, captured_at, epoch_id=epoch_id, cell_size=cell_size
            )
        finally:
            Path(tmp_path).unlink(missing_ok=True)
        return record

    @app.get("/missions/{mission_id}/epochs/{epoch_id}/dem.asc")
    def epoch_dem(mission_id: str, epoch_id: str):
        record = st.get_epoch(mission_id, epoch_id)
        return FileResponse(st.mission_dir(mission_id) / record.dem_path, media_type="text/plain")

    @app.get("/missions/{mission_id}/epochs/{epoch_id}/hillshade.png")
    def epoch_hillshade(mission_id: str, epoch_id: str):
        record = st.get_epoch(mission_id, epoch_id)
        return FileResponse(
            st.mission_dir(mission_id) / record.hillshade_path, media_type="image/png"
        )

    @app.post("/missions/{mission_id}/profiles")
    def profiles(mission_id: str, body: ProfilesBody):
        mission = st.get_mission(mission_id)
        line = analytics.parse_line_geojson(body.line)
        origin = mission.mission_origin
        out = []
        for epoch_id in body.epochs:
            grid = st.load_dem(mission_id, epoch_id)
            out.append(
                _profile_payload(
                    analytics.extract_profile(grid, line, origin, step_m=body.step_m)
                )
            )
        deltas = None
        if len(out) == 2:
            a = [s["elev_m"] for s in out[0]["stations"]]
            b = [s["elev_m"] for s in out[1]["stations"]]
            deltas = [
                None if (x is None or y is None) else round(y - x, 3) for x, y in zip(a, b)
            ]
        return {"profiles": out, "deltas": deltas}

    @app.post("/missions/{mission_id}/diff")
    def diff(mission_id: str, body: DiffBody):
        mission = st.get_mission(mission_id)
        dem_a = st.load_dem(mission_id, body.epoch_a)
        dem_b = st.load_dem(mission_id, body.epoch_b)
        diff_grid, change = analytics.diff_dem(dem_a, dem_b, threshold=body.threshold)
        zones = analytics.detect_hazard_zones(diff_grid, drop_threshold_m=body.threshold)
        advisory = analytics.standoff_buffer(zones, body.standoff) if zones else None
        geo = analytics.zones_to_geojson(
            zones,
            advisory or analytics.StandoffAdvisory([], body.standoff),
            mission.mission_origin,
        )
        return {
            "change": change.to_dict(),
            "zones": [
                {"cell_count": z.cell_count, "peak_drop_m": round(z.peak_drop_m, 3)}
                for z in zones
            ],
            "standoff_m": body.standoff,
            "geojson": geo,
        }

    @app.post("/missions/{mission_id}/inspection-points", status_code=201)
    def add_point(mission_id: str, body: InspectionBody):
        return st.add_inspection_point(
            mission_id, GeoPoint(body.lat, body.lon), body.risk, body.note
        )

    @app.put("/missions/{mission_id}/inspection-points/{point_id}")
    def update_point(mission_id: str, point_id: str, body: InspectionUpdateBody):
        if body.status is not None:
            point = st.set_status(mission_id, point_id, body.status)
        elif body.risk is not None:
            point = st.reassess_risk(mission_id, point_id, body.risk, body.note)
        else:
            raise ValueError("update requires `status` or `risk`")
        return point

    @app.get("/missions/{mission_id}/report")
    def report_md(mission_id: str, a: str = Query(...), b: str = Query(...)):
        markdown, _ = st.generate_report(mission_id, a, b)
        return PlainTextResponse(markdown, media_type="text/markdown")

    @app.get("/missions/{mission_id}/report.json")
    def report_json(mission_id: str, a: str = Query(...), b: str = Query(...)):
        _, sidecar = st.generate_report(mission_id, a, b)
        return sidecar

    return app

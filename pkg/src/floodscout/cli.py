"""`floodscout` command line: mirrors the HTTP API for scripted use."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analytics, coverage, raster, scenarios, sensors, store
from .geodesy import GeoPoint, MissionOrigin


def _parse_origin(text: str) -> MissionOrigin:
    parts = [float(v) for v in text.split(",")]
    if len(parts) < 2:
        raise argparse.ArgumentTypeError("origin must be lat,lon[,alt]")
    return MissionOrigin(GeoPoint(parts[0], parts[1], parts[2] if len(parts) > 2 else 0.0))


def _data_dir(args) -> str:
    return args.data_dir or os.environ.get("FLOODSCOUT_DATA_DIR", "./floodscout-data")


def cmd_plan(args):
    doc = json.loads(Path(args.polygon).read_text())
    poly = coverage.parse_polygon_geojson(doc)
    origin = args.origin or MissionOrigin(poly.vertices[0])
    cam = sensors.get_camera(args.camera)
    heading = None if args.heading == "auto" else float(args.heading)
    params = coverage.CoverageParams(
        altitude_agl=args.alt,
        side_overlap=args.side_overlap,
        front_overlap=args.front_overlap,
        heading=heading,
        cruise_speed=args.speed,
    )
    plan = coverage.plan_coverage(poly, cam, params, origin)
    Path(args.output).write_text(coverage.export_waypoints_json(plan))
    s = plan.stats
    print(
        f"{s.line_count} lines, {s.photo_count} photos, "
        f"{s.total_path_m:.0f} m path, est {s.est_flight_s:.0f} s, "
        f"GSD {s.est_gsd:.4f} m/px -> {args.output}"
    )


def cmd_dem_build(args):
    cloud = raster.read_xyz(args.cloud, origin=args.origin)
    grid = raster.rasterize(cloud, args.cell)
    radius = args.fill_radius if args.fill_radius is not None else 3.0 * args.cell
    grid = raster.fill_voids(grid, radius, args.min_neighbors)
    raster.write_asc(grid, args.output)
    print(
        f"{len(cloud.xyz)} points -> {grid.n_cols}x{grid.n_rows} grid "
        f"({grid.valid_fraction():.1%} valid) -> {args.output}"
    )


def cmd_dem_shade(args):
    grid = raster.read_asc(args.dem)
    img = raster.render_hillshade(grid, azimuth=args.azimuth, sun_alt=args.sun_alt)
    raster.write_hillshade_png(img, args.output)
    print(f"hillshade -> {args.output}")


def cmd_profile(args):
    grid = raster.read_asc(args.dem)
    line = analytics.parse_line_geojson(json.loads(Path(args.line).read_text()))
    profile = analytics.extract_profile(grid, line, args.origin, step_m=args.step)
    analytics.write_profile_csv(profile, args.origin, args.output)
    n_valid = sum(1 for s in profile.stations if s.elevation_m is not None)
    if profile.all_nodata:
        print("warning: profile line is entirely outside the DEM", file=sys.stderr)
    print(f"{len(profile.stations)} stations ({n_valid} with data) -> {args.output}")


def cmd_diff(args):
    dem_a = raster.read_asc(args.dem_a)
    dem_a.epoch_id = Path(args.dem_a).stem
    dem_b = raster.read_asc(args.dem_b)
    dem_b.epoch_id = Path(args.dem_b).stem
    diff_grid, change = analytics.diff_dem(dem_a, dem_b, threshold=args.threshold)
    zones = analytics.detect_hazard_zones(diff_grid, drop_threshold_m=args.threshold)
    advisory = analytics.standoff_buffer(zones, args.standoff) if zones else None
    out = {
        "change": change.to_dict(),
        "zones": [
            {"cell_count": z.cell_count, "peak_drop_m": round(z.peak_drop_m, 3)} for z in zones
        ],
        "standoff_m": args.standoff,
    }
    Path(args.output).write_text(json.dumps(out, indent=2) + "\n")
    if args.zones and args.origin:
        geo = analytics.zones_to_geojson(
            zones, advisory or analytics.StandoffAdvisory([], args.standoff), args.origin
        )
        Path(args.zones).write_text(json.dumps(geo, indent=2) + "\n")
    print(
        f"mean delta {change.mean_delta_m:+.3f} m, max drop {change.max_drop_m:.3f} m, "
        f"{len(zones)} hazard zone(s) -> {args.output}"
    )


def cmd_synth(args):
    preset = scenarios.PRESETS[args.preset](drop=args.drop, seed=args.seed)
    cloud_a, cloud_b = scenarios.make_epoch_pair(preset)
    out_a, out_b = args.output
    raster.write_xyz(cloud_a, out_a, header_lines=["crs enu"])
    raster.write_xyz(cloud_b, out_b, header_lines=["crs enu"])
    truth = args.truth or str(Path(out_a).with_name("ground_truth.json"))
    Path(truth).write_text(json.dumps(scenarios.ground_truth_dict(preset), indent=2) + "\n")
    print(f"{len(cloud_a.xyz)} points per epoch -> {out_a}, {out_b}; truth -> {truth}")


def cmd_report(args):
    st = store.MissionStore(_data_dir(args))
    markdown, sidecar = st.generate_report(
        args.mission, args.epoch_a, args.epoch_b, standoff_m=args.standoff
    )
    if args.output:
        Path(args.output).write_text(markdown)
        Path(args.output).with_suffix(".json").write_text(
            json.dumps(sidecar, indent=2) + "\n"
        )
        print(f"report -> {args.output}")
    else:
        print(markdown)


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(_data_dir(args)), host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="floodscout")
    p.add_argument("--data-dir", default=None, help="mission store root (or FLOODSCOUT_DATA_DIR)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="plan a meander coverage flight")
    sp.add_argument("--polygon", required=True, help="survey polygon GeoJSON")
    sp.add_argument("--camera", default="mz2")
    sp.add_argument("--alt", type=float, default=50.0)
    sp.add_argument("--side-overlap", type=float, default=0.65)
    sp.add_argument("--front-overlap", type=float, default=0.75)
    sp.add_argument("--heading", default="auto")
    sp.add_argument("--speed", type=float, default=5.0)
    sp.add_argument("--origin", type=_parse_origin, default=None, help="lat,lon[,alt]")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_plan)

    sd = sub.add_parser("dem", help="DEM products")
    dsub = sd.add_subparsers(dest="dem_command", required=True)
    sb = dsub.add_parser("build", help="rasterize a point cloud into a DEM")
    sb.add_argument("--cloud", required=True)
    sb.add_argument("--cell", type=float, default=store.DEFAULT_CELL_SIZE)
    sb.add_argument("--fill-radius", type=float, default=None)
    sb.add_argument("--min-neighbors", type=int, default=3)
    sb.add_argument("--origin", type=_parse_origin, default=None, help="for wgs84 clouds")
    sb.add_argument("-o", "--output", required=True)
    sb.set_defaults(func=cmd_dem_build)
    sh = dsub.add_parser("shade", help="render a hillshade PNG")
    sh.add_argument("dem")
    sh.add_argument("--azimuth", type=float, default=315.0)
    sh.add_argument("--sun-alt", type=float, default=45.0)
    sh.add_argument("-o", "--output", required=True)
    sh.set_defaults(func=cmd_dem_shade)

    spr = sub.add_parser("profile", help="elevation profile along a line")
    spr.add_argument("--dem", required=True)
    spr.add_argument("--line", required=True, help="LineString GeoJSON")
    spr.add_argument("--step", type=float, default=None)
    spr.add_argument("--origin", type=_parse_origin, required=True, help="lat,lon[,alt]")
    spr.add_argument("-o", "--output", required=True)
    spr.set_defaults(func=cmd_profile)

    sdf = sub.add_parser("diff", help="epoch-to-epoch DEM difference")
    sdf.add_argument("dem_a")
    sdf.add_argument("dem_b")
    sdf.add_argument("--threshold", type=float, default=0.2)
    sdf.add_argument("--standoff", type=float, default=100.0)
    sdf.add_argument("--zones", default=None, help="also write zones/buffers GeoJSON here")
    sdf.add_argument("--origin", type=_parse_origin, default=None)
    sdf.add_argument("-o", "--output", required=True)
    sdf.set_defaults(func=cmd_diff)

    ss = sub.add_parser("synth", help="generate a synthetic epoch pair")
    ss.add_argument("--preset", choices=sorted(scenarios.PRESETS), default="blessem-breach")
    ss.add_argument("--drop", type=float, default=0.40)
    ss.add_argument("--seed", type=int, default=7)
    ss.add_argument("--truth", default=None)
    ss.add_argument("-o", "--output", nargs=2, required=True, metavar=("EPOCH1", "EPOCH2"))
    ss.set_defaults(func=cmd_synth)

    sr = sub.add_parser("report", help="generate the mission report")
    sr.add_argument("mission")
    sr.add_argument("epoch_a")
    sr.add_argument("epoch_b")
    sr.add_argument("--standoff", type=float, default=100.0)
    sr.add_argument("-o", "--output", default=None)
    sr.set_defaults(func=cmd_report)

    sv = sub.add_parser("serve", help="run the survey HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, store.StoreError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

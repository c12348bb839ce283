import json
import math

import numpy as np
import pytest

from floodscout.coverage import (
    CoverageParams,
    InfeasibleSortieError,
    PlanningError,
    SurveyPolygon,
    auto_heading,
    estimate_stats,
    export_waypoints,
    export_waypoints_json,
    parse_polygon_geojson,
    partition_sorties,
    plan_coverage,
    verify_coverage,
)
from floodscout.geodesy import EnuPoint, GeoPoint, MissionOrigin, enu_to_wgs84, wgs84_to_enu
from floodscout.sensors import CameraSpec, footprint

ORIGIN = MissionOrigin(GeoPoint(50.80, 6.76))
MZ2 = CameraSpec("mz2", 4000, 3000, 83.0)


def enu_poly(coords, origin=ORIGIN):
    return SurveyPolygon([enu_to_wgs84(EnuPoint(e, n), origin) for e, n in coords])


SQUARE_200 = enu_poly([(0, 0), (200, 0), (200, 200), (0, 200)])
L_SHAPE = enu_poly([(0, 0), (300, 0), (300, 120), (150, 120), (150, 280), (0, 280)])


def square_params(**kw):
    defaults = dict(altitude_agl=50.0, side_overlap=0.6, front_overlap=0.8, heading=0.0)
    defaults.update(kw)
    return CoverageParams(**defaults)


def test_square_plan_spacing_lines_trigger():
    params = square_params()
    plan = plan_coverage(SQUARE_200, MZ2, params, ORIGIN)
    fp = footprint(MZ2, 50.0)
    assert plan.line_spacing == pytest.approx(fp.width * 0.4)
    assert plan.line_spacing == pytest.approx(35.4, abs=0.1)
    assert plan.trigger_distance == pytest.approx(fp.height * 0.2)
    assert plan.trigger_distance == pytest.approx(13.3, abs=0.1)
    assert plan.stats.line_count == 6


def test_more_side_overlap_means_more_lines():
    base = plan_coverage(SQUARE_200, MZ2, square_params(side_overlap=0.6), ORIGIN)
    dense = plan_coverage(SQUARE_200, MZ2, square_params(side_overlap=0.95), ORIGIN)
    assert dense.stats.line_count > base.stats.line_count


def test_degenerate_polygon_rejected():
    collinear = enu_poly([(0, 0), (100, 0), (200, 0)])
    with pytest.raises(PlanningError):
        plan_coverage(collinear, MZ2, square_params(), ORIGIN)
    bowtie = enu_poly([(0, 0), (100, 100), (100, 0), (0, 100)])
    with pytest.raises(PlanningError):
        plan_coverage(bowtie, MZ2, square_params(), ORIGIN)


def test_tiny_polygon_gets_single_line():
    tiny = enu_poly([(0, 0), (20, 0), (20, 10), (0, 10)])
    plan = plan_coverage(tiny, MZ2, square_params(), ORIGIN)
    assert plan.stats.line_count == 1


def test_auto_heading_east_west_rectangle():
    rect = enu_poly([(0, 0), (300, 0), (300, 100), (0, 100)])
    assert auto_heading(rect, ORIGIN) == pytest.approx(90.0, abs=0.01)


def test_auto_heading_square_ties_to_first_edge():
    # first edge runs north, so the tie-break heading is 0
    sq = enu_poly([(0, 0), (0, 100), (100, 100), (100, 0)])
    assert auto_heading(sq, ORIGIN) == pytest.approx(0.0, abs=0.01)


def test_auto_heading_rotated_rectangle():
    th = math.radians(30.0)
    d = (math.sin(th), math.cos(th))  # heading-30 direction
    p = (math.cos(th), -math.sin(th))
    corners = []
    for a, b in [(0, 0), (300, 0), (300, 100), (0, 100)]:
        corners.append((a * d[0] + b * p[0], a * d[1] + b * p[1]))
    assert auto_heading(enu_poly(corners), ORIGIN) == pytest.approx(30.0, abs=0.1)


def test_verify_coverage_full_and_sabotaged():
    params = square_params()
    plan = plan_coverage(SQUARE_200, MZ2, params, ORIGIN)
    assert verify_coverage(plan, SQUARE_200, MZ2, params, ORIGIN) == 1.0

    empty = plan.__class__(**{**plan.__dict__, "photos_by_line": [[] for _ in plan.lines]})
    assert verify_coverage(empty, SQUARE_200, MZ2, params, ORIGIN) == 0.0

    params_thin = square_params(side_overlap=0.2)
    plan_thin = plan_coverage(SQUARE_200, MZ2, params_thin, ORIGIN)
    gutted = plan_thin.__class__(
        **{
            **plan_thin.__dict__,
            "photos_by_line": [
                p if i % 2 == 0 else [] for i, p in enumerate(plan_thin.photos_by_line)
            ],
        }
    )
    assert verify_coverage(gutted, SQUARE_200, MZ2, params_thin, ORIGIN) < 1.0


def test_l_shape_full_coverage():
    params = square_params(heading=0.0, side_overlap=0.3, front_overlap=0.3)
    plan = plan_coverage(L_SHAPE, MZ2, params, ORIGIN)
    assert verify_coverage(plan, L_SHAPE, MZ2, params, ORIGIN) == 1.0


def test_boustrophedon_alternation():
    plan = plan_coverage(SQUARE_200, MZ2, square_params(), ORIGIN)
    dirs = []
    for start, end in plan.lines:
        dirs.append(math.copysign(1.0, (end.east - start.east) or (end.north - start.north)))
    assert all(a == -b for a, b in zip(dirs, dirs[1:]))


def test_photo_count_matches_per_line_recount():
    plan = plan_coverage(SQUARE_200, MZ2, square_params(), ORIGIN)
    t = plan.trigger_distance
    expected = 0
    for start, end in plan.lines:
        length = math.hypot(end.east - start.east, end.north - start.north)
        stations = int(math.floor(length / t + 1e-9)) + 1
        if length - math.floor(length / t + 1e-9) * t > 1e-9:
            stations += 1
        expected += stations
    assert plan.stats.photo_count == expected


def test_photos_lie_on_their_lines():
    plan = plan_coverage(SQUARE_200, MZ2, square_params(), ORIGIN)
    for (start, end), photos in zip(plan.lines, plan.photos_by_line):
        dx, dy = end.east - start.east, end.north - start.north
        length = math.hypot(dx, dy)
        for p in photos:
            cross = (p.east - start.east) * dy - (p.north - start.north) * dx
            assert abs(cross) / length < 1e-6


def test_translation_invariance():
    params = square_params()
    plan_a = plan_coverage(SQUARE_200, MZ2, params, ORIGIN)
    shifted = enu_poly([(500, 300), (700, 300), (700, 500), (500, 500)])
    plan_b = plan_coverage(shifted, MZ2, params, ORIGIN)
    assert len(plan_a.photo_positions) == len(plan_b.photo_positions)
    for a, b in zip(plan_a.photo_positions, plan_b.photo_positions):
        assert b.east - a.east == pytest.approx(500, abs=1e-3)
        assert b.north - a.north == pytest.approx(300, abs=1e-3)


def test_cyclic_vertex_rotation_invariance():
    params = square_params()
    coords = [(0, 0), (200, 0), (200, 200), (0, 200)]
    plan_a = plan_coverage(enu_poly(coords), MZ2, params, ORIGIN)
    plan_b = plan_coverage(enu_poly(coords[2:] + coords[:2]), MZ2, params, ORIGIN)
    for a, b in zip(plan_a.photo_positions, plan_b.photo_positions):
        assert math.hypot(a.east - b.east, a.north - b.north) < 1e-3


def test_estimate_stats_simple_cases():
    params = square_params(cruise_speed=5.0, turn_penalty=3.0)
    line = (EnuPoint(0, 0, 50), EnuPoint(100, 0, 50))
    stats = estimate_stats([line], 0, params, MZ2)
    assert stats.est_flight_s == pytest.approx(20.0)
    assert estimate_stats([], 0, params, MZ2).total_path_m == 0.0
    assert estimate_stats([], 0, params, MZ2).est_flight_s == 0.0


def test_partition_sorties():
    params = square_params()
    plan = plan_coverage(SQUARE_200, MZ2, params, ORIGIN)

    whole = partition_sorties(plan, 10_000, params, MZ2)
    assert len(whole) == 1 and whole[0].lines == plan.lines

    split = partition_sorties(plan, 130, params, MZ2)
    assert sum(len(s.lines) for s in split) == len(plan.lines)
    assert [line for s in split for line in s.lines] == plan.lines
    assert all(s.stats.est_flight_s <= 130 for s in split)

    with pytest.raises(InfeasibleSortieError):
        partition_sorties(plan, 10, params, MZ2)


def test_six_equal_lines_pair_up():
    # endurance fits exactly two lines plus the transit and one turn
    params = CoverageParams(altitude_agl=50, heading=0.0, cruise_speed=5.0, turn_penalty=3.0)
    lines = []
    for i in range(6):
        y = i * 10.0
        a, b = EnuPoint(0, y, 50), EnuPoint(100, y, 50)
        lines.append((a, b) if i % 2 == 0 else (b, a))
    plan = plan_coverage(SQUARE_200, MZ2, square_params(), ORIGIN)
    plan = plan.__class__(**{**plan.__dict__, "lines": lines, "photos_by_line": [[] for _ in lines], "waypoints": plan.waypoints[:12]})
    two_line_time = estimate_stats(lines[:2], 0, params, MZ2).est_flight_s
    sorties = partition_sorties(plan, two_line_time + 1.0, params, MZ2)
    assert [len(s.lines) for s in sorties] == [2, 2, 2]


def test_export_waypoints_structure_and_determinism():
    plan = plan_coverage(SQUARE_200, MZ2, square_params(), ORIGIN)
    doc = export_waypoints(plan)
    points = [f for f in doc["features"] if f["geometry"]["type"] == "Point"]
    lines = [f for f in doc["features"] if f["geometry"]["type"] == "LineString"]
    assert len(points) == len(plan.waypoints)
    assert len(lines) == 1
    assert points[0]["properties"]["order"] == 0
    assert points[0]["properties"]["action"] == "line_start"

    text = export_waypoints_json(plan)
    reexport = json.dumps(json.loads(text), indent=2) + "\n"
    assert text == reexport


def test_parse_polygon_geojson_variants():
    ring = [[6.76, 50.80], [6.77, 50.80], [6.77, 50.81], [6.76, 50.81], [6.76, 50.80]]
    geom = {"type": "Polygon", "coordinates": [ring]}
    assert len(parse_polygon_geojson(geom).vertices) == 4
    feature = {"type": "Feature", "geometry": geom, "properties": {}}
    assert len(parse_polygon_geojson(feature).vertices) == 4
    with pytest.raises(PlanningError):
        parse_polygon_geojson({"type": "Polygon", "coordinates": [ring, ring]})
    with pytest.raises(PlanningError):
        parse_polygon_geojson({"type": "Point", "coordinates": [0, 0]})

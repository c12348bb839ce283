import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from floodscout.analytics import (
    AnalyticsError,
    ProfileLine,
    StandoffAdvisory,
    compare_profiles,
    convex_hull,
    detect_hazard_zones,
    diff_dem,
    estimate_recession_rate,
    extract_profile,
    parse_line_geojson,
    recommend_revisit,
    standoff_buffer,
    write_profile_csv,
)
from floodscout.geodesy import EnuPoint, GeoPoint, MissionOrigin, enu_to_wgs84
from floodscout.raster import NODATA_DEFAULT, DemGrid

ORIGIN = MissionOrigin(GeoPoint(50.80, 6.76))


def grid_from(values, cell=1.0, origin=(0.0, 0.0), epoch=""):
    return DemGrid(origin[0], origin[1], cell, np.asarray(values, dtype=float), epoch_id=epoch)


def enu_line(coords, label=""):
    return ProfileLine([enu_to_wgs84(EnuPoint(e, n), ORIGIN) for e, n in coords], label=label)


# --- profiles ----------------------------------------------------------------


def test_profile_constant_grid():
    g = grid_from(np.full((20, 20), 10.0))
    p = extract_profile(g, enu_line([(2, 2), (15, 15)]), ORIGIN, step_m=1.0)
    assert all(s.elevation_m == pytest.approx(10.0) for s in p.stations)


def test_profile_plane_oracle():
    easts = (np.arange(20) + 0.5) * 1.0
    g = grid_from(np.tile(0.1 * easts, (20, 1)))
    p = extract_profile(g, enu_line([(2, 10), (12, 10)]), ORIGIN, step_m=1.0)
    for s in p.stations:
        assert s.elevation_m == pytest.approx(0.1 * (2 + s.distance_m), abs=1e-9)
    assert p.stations[-1].distance_m == pytest.approx(10.0)


def test_profile_includes_vertices_and_exact_end():
    g = grid_from(np.full((30, 30), 1.0))
    L = math.hypot(7.3, 4.1)
    p = extract_profile(g, enu_line([(3, 3), (10.3, 7.1)]), ORIGIN, step_m=2.0)
    assert p.stations[0].distance_m == 0.0
    assert p.stations[-1].distance_m == pytest.approx(L, abs=1e-6)
    dists = p.distances
    assert np.all(np.diff(dists) > 0)


def test_profile_multi_vertex_stations():
    g = grid_from(np.full((30, 30), 1.0))
    p = extract_profile(g, enu_line([(1, 1), (11, 1), (11, 6)]), ORIGIN, step_m=3.0)
    assert np.any(np.abs(p.distances - 10.0) < 1e-6)  # interior vertex always sampled
    assert p.stations[-1].distance_m == pytest.approx(15.0, abs=1e-6)


def test_profile_outside_grid_flags_all_nodata():
    g = grid_from(np.full((5, 5), 1.0))
    p = extract_profile(g, enu_line([(100, 100), (110, 110)]), ORIGIN, step_m=1.0)
    assert p.all_nodata
    assert all(s.elevation_m is None for s in p.stations)


def test_compare_profiles_identity_and_offset():
    g = grid_from(np.full((20, 20), 10.0), epoch="a")
    g2 = grid_from(np.full((20, 20), 9.6), epoch="b")
    line = enu_line([(2, 2), (15, 2)])
    pa = extract_profile(g, line, ORIGIN, step_m=1.0)
    pb = extract_profile(g2, line, ORIGIN, step_m=1.0)
    self_cmp = compare_profiles(pa, pa)
    assert np.allclose(self_cmp.deltas, 0.0)
    cmp = compare_profiles(pa, pb)
    assert cmp.mean_delta_m == pytest.approx(-0.40)
    assert cmp.min_delta_m == pytest.approx(-0.40)


def test_compare_profiles_nodata_propagates():
    vals = np.full((20, 20), 10.0)
    vals[2, 5] = NODATA_DEFAULT  # punch a hole near the line
    vals[1:4, 4:7] = NODATA_DEFAULT
    ga = grid_from(vals, epoch="a")
    gb = grid_from(np.full((20, 20), 9.0), epoch="b")
    line = enu_line([(0.5, 2.5), (15.5, 2.5)])
    pa = extract_profile(ga, line, ORIGIN, step_m=1.0)
    pb = extract_profile(gb, line, ORIGIN, step_m=1.0)
    assert any(s.elevation_m is None for s in pa.stations)
    cmp = compare_profiles(pa, pb)
    assert np.isnan(cmp.deltas).any()
    valid = ~np.isnan(cmp.deltas)
    assert cmp.mean_delta_m == pytest.approx(float(cmp.deltas[valid].mean()))


def test_compare_profiles_mismatched_stations():
    g = grid_from(np.full((20, 20), 10.0))
    pa = extract_profile(g, enu_line([(2, 2), (15, 2)]), ORIGIN, step_m=1.0)
    pb = extract_profile(g, enu_line([(2, 2), (15, 2)]), ORIGIN, step_m=2.0)
    with pytest.raises(AnalyticsError):
        compare_profiles(pa, pb)


def test_profile_csv_format(tmp_path):
    vals = np.full((10, 10), 3.5)
    vals[:, 7:] = NODATA_DEFAULT
    g = grid_from(vals)
    p = extract_profile(g, enu_line([(1, 5), (9, 5)]), ORIGIN, step_m=2.0)
    out = tmp_path / "p.csv"
    write_profile_csv(p, ORIGIN, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "station_m,lat,lon,elev_m"
    first = lines[1].split(",")
    assert first[0] == "0.000" and first[3] == "3.500"
    assert lines[-1].endswith(",")  # nodata written as empty field


# --- diff --------------------------------------------------------------------


def test_diff_self_is_zero():
    g = grid_from(np.random.default_rng(1).uniform(0, 5, (10, 10)), epoch="a")
    diff, rep = diff_dem(g, g)
    assert np.allclose(diff.values[diff.valid_mask], 0.0)
    assert rep.mean_delta_m == 0.0 and rep.max_drop_m == 0.0


def test_diff_uniform_offset():
    rng = np.random.default_rng(2)
    vals = rng.uniform(0, 5, (10, 10))
    a = grid_from(vals, epoch="a")
    b = grid_from(vals - 0.4, epoch="b")
    _, rep = diff_dem(a, b, threshold=0.2)
    assert rep.mean_delta_m == pytest.approx(-0.400, abs=1e-9)
    assert rep.max_drop_m == pytest.approx(0.400, abs=1e-9)
    assert rep.area_exceeding_m2 == pytest.approx(100.0)
    assert rep.valid_cell_fraction == 1.0


def test_diff_antisymmetry():
    rng = np.random.default_rng(3)
    a = grid_from(rng.uniform(0, 5, (8, 8)))
    b = grid_from(rng.uniform(0, 5, (8, 8)))
    dab, _ = diff_dem(a, b)
    dba, _ = diff_dem(b, a)
    assert np.allclose(dab.values, -dba.values)


def test_diff_nodata_propagation_and_resample():
    vals = np.random.default_rng(4).uniform(0, 5, (10, 10))
    a = grid_from(vals.copy())
    a.values[0, 0] = NODATA_DEFAULT
    b = grid_from(vals + 1.0, origin=(0.0, 0.0))
    diff, rep = diff_dem(a, b)
    assert diff.values[0, 0] == NODATA_DEFAULT
    assert rep.valid_cell_fraction < 1.0
    # different geometry -> resampled, constant offset preserved in interior
    b_shift = grid_from(np.full((12, 12), 2.0), origin=(-1.0, -1.0))
    a_const = grid_from(np.full((10, 10), 1.5))
    _, rep2 = diff_dem(a_const, b_shift)
    assert rep2.mean_delta_m == pytest.approx(0.5, abs=1e-9)


# --- hazard zones ------------------------------------------------------------


def make_diff(drop_mask, drop=0.4):
    vals = np.zeros(drop_mask.shape)
    vals[drop_mask] = -drop
    return grid_from(vals)


def test_zone_uniform_drop_spans_everything():
    diff = make_diff(np.ones((10, 10), dtype=bool))
    zones = detect_hazard_zones(diff, 0.2)
    assert len(zones) == 1
    assert zones[0].cell_count == 100
    assert zones[0].peak_drop_m == pytest.approx(0.4)


def test_zone_none_when_below_threshold():
    diff = make_diff(np.ones((5, 5), dtype=bool), drop=0.1)
    assert detect_hazard_zones(diff, 0.2) == []


def test_two_separated_blobs():
    mask = np.zeros((20, 20), dtype=bool)
    mask[2:4, 2:7] = True  # 10 cells
    mask[10:12, 10:15] = True  # 10 cells
    zones = detect_hazard_zones(make_diff(mask), 0.2)
    assert len(zones) == 2
    assert {z.cell_count for z in zones} == {10}


def test_small_components_discarded():
    mask = np.zeros((10, 10), dtype=bool)
    mask[1, 1] = True
    mask[5:8, 5] = True  # 3 cells, under the default min_cells=4
    assert detect_hazard_zones(make_diff(mask), 0.2) == []
    assert len(detect_hazard_zones(make_diff(mask), 0.2, min_cells=1)) == 2


def test_diagonal_cells_are_not_connected():
    mask = np.zeros((10, 10), dtype=bool)
    mask[2:4, 2:4] = True
    mask[4:6, 4:6] = True  # touches only diagonally
    zones = detect_hazard_zones(make_diff(mask), 0.2, min_cells=4)
    assert len(zones) == 2


def test_zone_cells_inside_hull():
    mask = np.zeros((15, 15), dtype=bool)
    mask[3:9, 4:11] = True
    mask[5:7, 11:13] = True
    zones = detect_hazard_zones(make_diff(mask), 0.2)
    assert len(zones) == 1
    hull = zones[0].polygon
    # every member cell center inside (or on) the hull
    import shapely
    from shapely.geometry import Polygon

    poly = Polygon(hull)
    rows, cols = np.nonzero(mask)
    for r, c in zip(rows, cols):
        assert poly.buffer(1e-9).contains(shapely.geometry.Point(c + 0.5, r + 0.5))


# --- convex hull / standoff --------------------------------------------------


def test_convex_hull_basics():
    square = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)]
    assert set(convex_hull(square)) == {(0, 0), (2, 0), (2, 2), (0, 2)}
    assert convex_hull([(1, 1)]) == [(1.0, 1.0)]
    assert convex_hull([(0, 0), (1, 1), (2, 2)]) == [(0.0, 0.0), (2.0, 2.0)]


def test_standoff_point_zone_is_16gon():
    from floodscout.analytics import HazardZone

    zone = HazardZone(polygon=[(10.0, 20.0)], cell_count=1, peak_drop_m=0.5)
    adv = standoff_buffer([zone], 100.0)
    buf = adv.buffer_polygons[0]
    assert len(buf) == 16
    for x, y in buf:
        assert math.hypot(x - 10, y - 20) == pytest.approx(100.0)


def test_standoff_clearance_bound_randomized():
    from shapely.geometry import Point, Polygon

    from floodscout.analytics import HazardZone

    rng = np.random.default_rng(7)
    for _ in range(20):
        pts = rng.uniform(-50, 50, (rng.integers(3, 12), 2))
        hull = convex_hull([tuple(p) for p in pts])
        if len(hull) < 3:
            continue
        zone = HazardZone(polygon=hull, cell_count=len(pts), peak_drop_m=1.0)
        adv = standoff_buffer([zone], 100.0)
        buf = Polygon(adv.buffer_polygons[0])
        zone_poly = Polygon(hull)
        assert buf.contains(zone_poly)
        assert buf.area > zone_poly.area
        bound = 100.0 * math.cos(math.pi / 16)
        for x, y in hull:
            assert buf.exterior.distance(Point(x, y)) >= bound - 1e-6


# --- rates and cadence -------------------------------------------------------


def fake_report(mean_delta):
    from floodscout.analytics import ChangeReport

    return ChangeReport("a", "b", mean_delta, mean_delta, mean_delta, max(0.0, -mean_delta), 0.0, 0.2, 1.0)


def test_recession_rate():
    assert estimate_recession_rate(fake_report(-0.40), 24.0) == pytest.approx(0.01667, abs=1e-5)
    assert estimate_recession_rate(fake_report(0.0), 24.0) == 0.0
    assert estimate_recession_rate(fake_report(-0.40), 12.0) == pytest.approx(
        2 * estimate_recession_rate(fake_report(-0.40), 24.0)
    )
    with pytest.raises(AnalyticsError):
        estimate_recession_rate(fake_report(-0.1), 0.0)


def test_recommend_revisit():
    assert recommend_revisit(0.40 / 24.0, 0.05) == pytest.approx(3.0, abs=0.01)
    assert recommend_revisit(0.0) == 24.0
    assert recommend_revisit(10.0, 0.05) == 0.25
    with pytest.raises(AnalyticsError):
        recommend_revisit(-1.0)
    with pytest.raises(AnalyticsError):
        recommend_revisit(0.1, 0.0)


@given(st.floats(1e-6, 100.0), st.floats(1e-4, 10.0), st.floats(1e-4, 10.0))
def test_revisit_monotone_and_clamped(rate, b1, b2):
    lo, hi = sorted([b1, b2])
    assert 0.25 <= recommend_revisit(rate, lo) <= 24.0
    assert recommend_revisit(rate, lo) <= recommend_revisit(rate, hi)
    assert recommend_revisit(rate * 2, lo) <= recommend_revisit(rate, lo)


# --- property tests over randomized grids -------------------------------------

grids = hnp.arrays(
    dtype=float,
    shape=st.tuples(st.integers(4, 12), st.integers(4, 12)),
    elements=st.floats(-10, 10, allow_nan=False),
)


@settings(max_examples=30, deadline=None)
@given(grids, st.floats(-5, 5, allow_nan=False))
def test_diff_translation_invariance(vals, k):
    a = grid_from(vals)
    b = grid_from(vals * 0.5 + 1.0)
    d1, _ = diff_dem(a, b)
    d2, _ = diff_dem(grid_from(vals + k), grid_from(vals * 0.5 + 1.0 + k))
    assert np.allclose(d1.values, d2.values, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(grids)
def test_diff_self_zero_property(vals):
    g = grid_from(vals)
    diff, rep = diff_dem(g, g)
    assert np.allclose(diff.values[diff.valid_mask], 0.0)
    assert rep.mean_delta_m == 0.0


def test_profile_vs_raster_mean_delta_consistency():
    rng = np.random.default_rng(9)
    vals = rng.uniform(0, 3, (30, 30))
    a = grid_from(vals, epoch="a")
    b = grid_from(vals - 0.37, epoch="b")
    _, rep = diff_dem(a, b)
    line = enu_line([(3.3, 14.2), (26.1, 17.8)])
    pa = extract_profile(a, line, ORIGIN, step_m=0.5)
    pb = extract_profile(b, line, ORIGIN, step_m=0.5)
    cmp = compare_profiles(pa, pb)
    assert cmp.mean_delta_m == pytest.approx(rep.mean_delta_m, abs=1e-6)


def test_parse_line_geojson():
    doc = {
        "type": "Feature",
        "properties": {"label": "breach"},
        "geometry": {"type": "LineString", "coordinates": [[6.76, 50.80], [6.77, 50.81]]},
    }
    line = parse_line_geojson(doc)
    assert line.label == "breach"
    assert len(line.vertices) == 2
    with pytest.raises(AnalyticsError):
        parse_line_geojson({"type": "Point", "coordinates": [0, 0]})

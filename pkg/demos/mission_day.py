"""A full mission day against the file store: create a mission, file a
flight plan, ingest two survey epochs, mark inspection points, and print
the automated report."""

import tempfile
from pathlib import Path

from floodscout import coverage, raster, scenarios, sensors, store
from floodscout.geodesy import EnuPoint, GeoPoint, MissionOrigin, enu_to_wgs84

workdir = Path(tempfile.mkdtemp(prefix="floodscout-demo-"))
st = store.MissionStore(workdir / "data")

origin = GeoPoint(50.80, 6.76)
mission = st.create_mission("Levee Breach Watch", origin)
print(f"mission {mission.id!r} created in {workdir / 'data'}")

m_origin = MissionOrigin(origin)
square = coverage.SurveyPolygon(
    [enu_to_wgs84(EnuPoint(e, n), m_origin) for e, n in
     [(0, 0), (150, 0), (150, 150), (0, 150)]]
)
cam = sensors.get_camera("mz2")
params = coverage.CoverageParams(altitude_agl=50.0)
plan = coverage.plan_coverage(square, cam, params, m_origin)
entry = st.save_plan(mission.id, plan)
print(f"plan filed: {entry['stats']['line_count']} lines, "
      f"{entry['stats']['photo_count']} photos")

spec = scenarios.blessem_breach_preset(drop=0.40, seed=7)
cloud_a, cloud_b = scenarios.make_epoch_pair(spec)
for cloud, captured, eid in [
    (cloud_a, "2021-07-17T10:00:00Z", "day1"),
    (cloud_b, "2021-07-18T10:00:00Z", "day2"),
]:
    path = workdir / f"{eid}.xyz"
    raster.write_xyz(cloud, path)
    rec = st.register_epoch(mission.id, path, captured, epoch_id=eid)
    print(f"epoch {rec.epoch_id}: {rec.point_count} points, "
          f"{rec.valid_cell_fraction:.2%} valid cells")

p1 = st.add_inspection_point(mission.id, GeoPoint(50.8006, 6.7611), "high",
                             "scour hole at the levee toe")
st.add_inspection_point(mission.id, GeoPoint(50.8003, 6.7605), "medium",
                        "debris against bridge pier")
st.set_status(mission.id, p1.id, "inspected")
print(f"inspection points filed, {p1.id} already inspected")

markdown, sidecar = st.generate_report(mission.id, "day1", "day2")
print()
print(markdown)
print(f"sidecar says: revisit every {sidecar['revisit_interval_h']} h")

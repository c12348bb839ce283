"""Plan a meander flight over an L-shaped riverside block and check that
every square meter ends up inside at least one photo footprint."""

import json
import os

from floodscout.coverage import (
    CoverageParams,
    SurveyPolygon,
    export_waypoints,
    partition_sorties,
    plan_coverage,
    verify_coverage,
)
from floodscout.geodesy import EnuPoint, GeoPoint, MissionOrigin, enu_to_wgs84
from floodscout.sensors import footprint, get_camera, gsd

origin = MissionOrigin(GeoPoint(50.80, 6.76))

# survey block: 300 x 280 m with a 150 x 160 m bite taken out of one corner
corners_enu = [(0, 0), (300, 0), (300, 120), (150, 120), (150, 280), (0, 280)]
block = SurveyPolygon([enu_to_wgs84(EnuPoint(e, n), origin) for e, n in corners_enu])

cam = get_camera("mz2")
params = CoverageParams(altitude_agl=50.0, side_overlap=0.65, front_overlap=0.75)

fp = footprint(cam, params.altitude_agl)
print(f"camera {cam.name}: footprint {fp.width:.1f} x {fp.height:.1f} m at "
      f"{params.altitude_agl:.0f} m AGL, GSD {gsd(cam, params.altitude_agl)*100:.1f} cm/px")

plan = plan_coverage(block, cam, params, origin)
s = plan.stats
print(f"heading {plan.heading_deg:.1f} deg, {s.line_count} lines, "
      f"spacing {plan.line_spacing:.1f} m, trigger every {plan.trigger_distance:.1f} m")
print(f"{s.photo_count} photos, {s.total_path_m:.0f} m path, "
      f"about {s.est_flight_s/60:.1f} min in the air")

covered = verify_coverage(plan, block, cam, params, origin)
print(f"independent coverage check: {covered:.1%} of the interior imaged")

# a small quad cannot always do this in one battery
for endurance in (1500.0, 400.0):
    sorties = partition_sorties(plan, endurance, params, cam)
    print(f"endurance {endurance:.0f} s -> {len(sorties)} sortie(s), "
          f"lines per sortie: {[p.stats.line_count for p in sorties]}")

os.makedirs("out", exist_ok=True)
with open("out/waypoints.geojson", "w") as f:
    json.dump(export_waypoints(plan), f, indent=2)
print("waypoints written to out/waypoints.geojson")

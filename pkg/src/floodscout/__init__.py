"""Mission-support toolkit for UAV flood surveys: meander flight planning,
point-cloud-to-DEM processing, and epoch-to-epoch terrain change analytics."""

from .geodesy import (
    EnuPoint,
    GeoPoint,
    MissionOrigin,
    enu_to_wgs84,
    geodesic_distance,
    wgs84_to_enu,
)
from .sensors import CameraSpec, FootprintDims, footprint, get_camera, gsd, load_catalog, vfov
from .coverage import (
    CoverageParams,
    CoveragePlan,
    PlanStats,
    SurveyPolygon,
    auto_heading,
    export_waypoints,
    partition_sorties,
    plan_coverage,
    verify_coverage,
)
from .raster import (
    DemGrid,
    HillshadeImage,
    PointCloud,
    fill_voids,
    rasterize,
    read_asc,
    read_xyz,
    render_hillshade,
    resample_onto,
    sample_bilinear,
    write_asc,
    write_xyz,
)
from .analytics import (
    ChangeReport,
    ElevationProfile,
    HazardZone,
    ProfileLine,
    StandoffAdvisory,
    compare_profiles,
    detect_hazard_zones,
    diff_dem,
    estimate_recession_rate,
    extract_profile,
    recommend_revisit,
    standoff_buffer,
)
from .scenarios import EpochPairSpec, TerrainSpec, make_epoch_pair, sample_terrain
from .store import MissionStore

__version__ = "0.1.0"

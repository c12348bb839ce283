/**
 * Typed client for the survey service HTTP API.
 *
 * Every JSON body that comes back is recorded (deep-frozen) in
 * `received`, so tests can check that nothing shown in the UI was
 * recomputed client-side: each displayed number must be traceable to one
 * of these payloads.
 */

export interface OriginLL {
  lat: number;
  lon: number;
  alt?: number;
}

export interface PlanStats {
  total_path_m: number;
  est_flight_s: number;
  photo_count: number;
  line_count: number;
  est_gsd_m_per_px: number;
}

export interface PlanEntry {
  path: string;
  heading_deg: number;
  trigger_distance_m: number;
  line_spacing_m: number;
  stats: PlanStats;
}

export interface PlanResponse {
  plan: PlanEntry;
  waypoints: GeoJsonCollection;
}

export interface GeoJsonFeature {
  type: "Feature";
  geometry: { type: string; coordinates: unknown };
  properties: Record<string, unknown>;
}

export interface GeoJsonCollection {
  type: "FeatureCollection";
  features: GeoJsonFeature[];
  properties?: Record<string, unknown>;
}

export interface ChangeReport {
  epoch_a: string;
  epoch_b: string;
  mean_delta_m: number;
  median_delta_m: number;
  p05_delta_m: number;
  max_drop_m: number;
  area_exceeding_m2: number;
  threshold_m: number;
  compared_cells: number;
}

export interface ZoneSummary {
  cell_count: number;
  peak_drop_m: number;
}

export interface DiffResponse {
  change: ChangeReport;
  zones: ZoneSummary[];
  standoff_m: number;
  geojson: GeoJsonCollection;
}

export interface ProfileStation {
  station_m: number;
  east: number;
  north: number;
  elev_m: number | null;
}

export interface ProfilePayload {
  epoch_id: string;
  step_m: number;
  label?: string;
  all_nodata: boolean;
  stations: ProfileStation[];
}

export interface ProfilesResponse {
  profiles: ProfilePayload[];
  deltas: (number | null)[] | null;
}

export interface EpochRecord {
  epoch_id: string;
  captured_at: string;
  cloud_path: string;
  dem_path: string;
  hillshade_path: string;
  point_count: number;
  valid_cell_fraction: number;
}

export interface InspectionPoint {
  id: string;
  lat: number;
  lon: number;
  risk: "low" | "medium" | "high";
  status: "open" | "inspected" | "inaccessible";
  note: string;
  created_at: string;
  updated_at: string;
  audit: unknown[];
}

export interface Mission {
  id: string;
  name: string;
  created_at: string;
  origin: OriginLL;
  survey_polygon: [number, number][] | null;
  epochs: EpochRecord[];
  inspection_points: InspectionPoint[];
  plans: PlanEntry[];
}

export interface ApiError {
  code: string;
  message: string;
}

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public body: ApiError,
  ) {
    super(body.message);
  }
}

function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === "object") {
    for (const v of Object.values(value as Record<string, unknown>)) {
      deepFreeze(v);
    }
    Object.freeze(value);
  }
  return value;
}

export class ApiClient {
  /** every JSON payload the server has sent back, in order */
  received: unknown[] = [];
  /** request log for the no-recompute assertion in tests */
  requests: { method: string; path: string }[] = [];

  constructor(
    public baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.requests.push({ method, path });
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { "content-type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const payload = await res.json();
    if (!res.ok) {
      throw new ApiRequestError(res.status, payload as ApiError);
    }
    this.received.push(deepFreeze(payload));
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.call("GET", "/healthz");
  }

  createMission(name: string, origin: OriginLL, surveyPolygon?: unknown): Promise<Mission> {
    return this.call("POST", "/missions", {
      name,
      origin,
      survey_polygon: surveyPolygon ?? null,
    });
  }

  getMission(id: string): Promise<Mission> {
    return this.call("GET", `/missions/${id}`);
  }

  listMissions(): Promise<Mission[]> {
    return this.call("GET", "/missions");
  }

  submitPlan(
    missionId: string,
    polygon: unknown,
    opts: {
      camera?: string;
      altitude_agl?: number;
      side_overlap?: number;
      front_overlap?: number;
      heading?: number | null;
    } = {},
  ): Promise<PlanResponse> {
    return this.call("POST", `/missions/${missionId}/plan`, { polygon, ...opts });
  }

  requestProfiles(
    missionId: string,
    line: unknown,
    epochs: string[],
    stepM?: number,
  ): Promise<ProfilesResponse> {
    return this.call("POST", `/missions/${missionId}/profiles`, {
      line,
      epochs,
      step_m: stepM ?? null,
    });
  }

  requestDiff(
    missionId: string,
    epochA: string,
    epochB: string,
    opts: { threshold?: number; standoff?: number } = {},
  ): Promise<DiffResponse> {
    return this.call("POST", `/missions/${missionId}/diff`, {
      epoch_a: epochA,
      epoch_b: epochB,
      ...opts,
    });
  }

  addInspectionPoint(
    missionId: string,
    point: { lat: number; lon: number; risk: string; note?: string },
  ): Promise<InspectionPoint> {
    return this.call("POST", `/missions/${missionId}/inspection-points`, point);
  }

  setInspectionStatus(
    missionId: string,
    pointId: string,
    status: string,
  ): Promise<InspectionPoint> {
    return this.call("PUT", `/missions/${missionId}/inspection-points/${pointId}`, {
      status,
    });
  }

  hillshadeUrl(missionId: string, epochId: string): string {
    return `${this.baseUrl}/missions/${missionId}/epochs/${epochId}/hillshade.png`;
  }
}

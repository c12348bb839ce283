/** Inspection point board: pins grouped by risk, status changes pushed to
 * the API with optimistic update and revert on failure. */

import { ApiClient, ApiRequestError, InspectionPoint } from "./api.js";

export type RiskGroups = Record<"high" | "medium" | "low", InspectionPoint[]>;

export function groupByRisk(points: InspectionPoint[]): RiskGroups {
  const groups: RiskGroups = { high: [], medium: [], low: [] };
  for (const p of points) {
    groups[p.risk].push(p);
  }
  return groups;
}

export function openCount(points: InspectionPoint[]): number {
  return points.filter((p) => p.status === "open").length;
}

export interface BoardActionResult {
  ok: boolean;
  /** API error message, surfaced as a toast when not ok */
  message: string | null;
}

export class InspectionBoard {
  points: InspectionPoint[] = [];
  lastToast: string | null = null;

  constructor(
    private api: ApiClient,
    private missionId: string,
  ) {}

  async reload(): Promise<void> {
    const mission = await this.api.getMission(this.missionId);
    this.points = [...mission.inspection_points];
  }

  async addPin(
    lat: number,
    lon: number,
    risk: string,
    note = "",
  ): Promise<InspectionPoint> {
    const created = await this.api.addInspectionPoint(this.missionId, {
      lat,
      lon,
      risk,
      note,
    });
    this.points.push(created);
    return created;
  }

  /** Optimistically flip the status, revert and toast if the API refuses. */
  async setStatus(pointId: string, status: string): Promise<BoardActionResult> {
    const idx = this.points.findIndex((p) => p.id === pointId);
    if (idx < 0) {
      return { ok: false, message: `unknown point ${pointId}` };
    }
    const before = this.points[idx];
    this.points[idx] = { ...before, status: status as InspectionPoint["status"] };
    try {
      this.points[idx] = await this.api.setInspectionStatus(
        this.missionId,
        pointId,
        status,
      );
      this.lastToast = null;
      return { ok: true, message: null };
    } catch (err) {
      this.points[idx] = before;
      const message =
        err instanceof ApiRequestError ? err.body.message : String(err);
      this.lastToast = message;
      return { ok: false, message };
    }
  }
}

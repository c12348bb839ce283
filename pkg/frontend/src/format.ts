/** Label and legend formatting. These functions only format fields taken
 * verbatim from API payloads; any arithmetic here is presentation (sign
 * flip for "drop", unit scaling), never analytics. */

import type { ChangeReport, PlanEntry } from "./api.js";

export function formatMeters(value: number, decimals = 3): string {
  return `${value.toFixed(decimals)} m`;
}

export function formatSeconds(s: number): string {
  return s >= 120 ? `${(s / 60).toFixed(1)} min` : `${s.toFixed(1)} s`;
}

/** Legend line for the diff layer, e.g. "mean drop 0.400 m". */
export function diffLegend(change: ChangeReport): string {
  return `mean drop ${(-change.mean_delta_m).toFixed(3)} m`;
}

export function standoffLabel(standoffM: number): string {
  return `standoff ${standoffM.toFixed(0)} m`;
}

export interface StatsRow {
  label: string;
  value: string;
  /** raw API field backing the displayed value */
  raw: number;
}

/** Rows of the plan stats panel; `raw` keeps the untouched API number so
 * tests can compare field-for-field. */
export function planStatsRows(plan: PlanEntry): StatsRow[] {
  const s = plan.stats;
  return [
    { label: "photos", value: String(s.photo_count), raw: s.photo_count },
    { label: "flight lines", value: String(s.line_count), raw: s.line_count },
    { label: "path length", value: formatMeters(s.total_path_m, 2), raw: s.total_path_m },
    { label: "est. flight time", value: formatSeconds(s.est_flight_s), raw: s.est_flight_s },
    {
      label: "GSD",
      value: `${(s.est_gsd_m_per_px * 100).toFixed(2)} cm/px`,
      raw: s.est_gsd_m_per_px,
    },
    {
      label: "line spacing",
      value: formatMeters(plan.line_spacing_m, 2),
      raw: plan.line_spacing_m,
    },
    {
      label: "trigger distance",
      value: formatMeters(plan.trigger_distance_m, 2),
      raw: plan.trigger_distance_m,
    },
  ];
}

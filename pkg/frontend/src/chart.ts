/** Elevation profile chart. The chart is an SVG polyline per epoch plus a
 * delta band; every plotted value is taken unmodified from the profiles
 * API response. Only the pixel projection happens client-side. */

import type { ProfilesResponse } from "./api.js";

export interface ChartSeries {
  epochId: string;
  /** [station_m, elev_m] pairs, API values untouched; nodata stations skipped */
  points: [number, number][];
}

export interface ChartModel {
  series: ChartSeries[];
  /** per-station deltas straight from the API (null where undefined) */
  deltas: (number | null)[] | null;
  /** stations of the first profile, for hover lookups */
  stations: number[];
  notice: string | null;
}

export function buildChartModel(response: ProfilesResponse): ChartModel {
  if (response.profiles.every((p) => p.all_nodata)) {
    return { series: [], deltas: null, stations: [], notice: "no data along line" };
  }
  const series = response.profiles.map((p) => ({
    epochId: p.epoch_id,
    points: p.stations
      .filter((s) => s.elev_m !== null)
      .map((s) => [s.station_m, s.elev_m as number] as [number, number]),
  }));
  const stations = response.profiles[0]?.stations.map((s) => s.station_m) ?? [];
  return { series, deltas: response.deltas, stations, notice: null };
}

export interface HoverInfo {
  station_m: number;
  elevations: { epochId: string; elev_m: number | null }[];
  delta_m: number | null;
}

export function hoverAt(response: ProfilesResponse, index: number): HoverInfo {
  const station = response.profiles[0].stations[index];
  return {
    station_m: station.station_m,
    elevations: response.profiles.map((p) => ({
      epochId: p.epoch_id,
      elev_m: p.stations[index].elev_m,
    })),
    delta_m: response.deltas ? response.deltas[index] : null,
  };
}

/** Project a series into an SVG path string for the given viewport. */
export function seriesPath(
  series: ChartSeries,
  width: number,
  height: number,
  xRange: [number, number],
  yRange: [number, number],
): string {
  const [x0, x1] = xRange;
  const [y0, y1] = yRange;
  const sx = (x: number) => ((x - x0) / (x1 - x0 || 1)) * width;
  const sy = (y: number) => height - ((y - y0) / (y1 - y0 || 1)) * height;
  return series.points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${sx(x).toFixed(1)},${sy(y).toFixed(1)}`)
    .join(" ");
}

/** Helpers for constructing drawn geometries in tests: the console's map
 * works in local ENU meters and emits WGS84 GeoJSON, like a drawing tool
 * would. Must match the server's spherical tangent-plane conventions. */

const EARTH_RADIUS_M = 6371000;

export const ORIGIN = { lat: 50.8, lon: 6.76 };

export function enuToLonLat(east: number, north: number): [number, number] {
  const latRad = (ORIGIN.lat * Math.PI) / 180;
  const lat = ORIGIN.lat + (north / EARTH_RADIUS_M) * (180 / Math.PI);
  const lon =
    ORIGIN.lon + (east / (EARTH_RADIUS_M * Math.cos(latRad))) * (180 / Math.PI);
  return [lon, lat];
}

export function polygonFromEnu(corners: [number, number][]): object {
  const ring = corners.map(([e, n]) => enuToLonLat(e, n));
  ring.push(ring[0]);
  return { type: "Polygon", coordinates: [ring] };
}

export function lineFromEnu(points: [number, number][]): object {
  return {
    type: "LineString",
    coordinates: points.map(([e, n]) => enuToLonLat(e, n)),
  };
}

/** Console session state: active mission, epoch selection, drawing mode,
 * layer toggles. Pure state, no DOM, no network. */

import type { Mission } from "./api.js";

export type DrawingMode = "polygon" | "profile" | "pin" | null;

export type LayerName =
  | "hillshade_a"
  | "hillshade_b"
  | "diff"
  | "zones"
  | "buffers"
  | "waypoints";

export class SessionError extends Error {}

export class ConsoleSession {
  activeMission: Mission | null = null;
  epochA: string | null = null;
  epochB: string | null = null;
  private mode: DrawingMode = null;
  layers: Record<LayerName, boolean> = {
    hillshade_a: true,
    hillshade_b: true,
    diff: true,
    zones: true,
    buffers: true,
    waypoints: true,
  };

  setMission(mission: Mission | null): void {
    this.activeMission = mission;
    this.epochA = null;
    this.epochB = null;
    this.mode = null;
  }

  get drawingMode(): DrawingMode {
    return this.mode;
  }

  /** at most one drawing mode active; entering a mode leaves the previous one */
  setDrawingMode(mode: DrawingMode): void {
    this.mode = mode;
  }

  private assertEpochExists(epochId: string): void {
    const mission = this.activeMission;
    if (!mission) {
      throw new SessionError("no active mission");
    }
    if (!mission.epochs.some((e) => e.epoch_id === epochId)) {
      throw new SessionError(
        `epoch ${epochId} is not part of mission ${mission.id}`,
      );
    }
  }

  selectEpochs(a: string, b: string): void {
    this.assertEpochExists(a);
    this.assertEpochExists(b);
    this.epochA = a;
    this.epochB = b;
  }

  /** epoch comparison controls are enabled only with two known epochs */
  get compareReady(): boolean {
    return this.epochA !== null && this.epochB !== null;
  }

  toggleLayer(name: LayerName): void {
    this.layers[name] = !this.layers[name];
  }
}

/** Entry point: wires the session, API client, and panels onto the page.
 * The map is a plain ENU canvas with the hillshade rasters as image
 * layers; there is no external tile provider (the console must work
 * offline on the field LAN). */

import { ApiClient, ApiRequestError } from "./api.js";
import { ConsoleSession } from "./session.js";
import { layerStyles } from "./layers.js";
import { buildChartModel, seriesPath } from "./chart.js";
import { InspectionBoard } from "./board.js";
import {
  renderDiffLegend,
  renderInspectionBoard,
  renderPlanError,
  renderStatsPanel,
  renderToast,
} from "./panels.js";

const api = new ApiClient(
  (window as unknown as { FLOODSCOUT_API?: string }).FLOODSCOUT_API ?? "",
);
const session = new ConsoleSession();

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

async function refreshMissionList(): Promise<void> {
  const missions = await api.listMissions();
  const select = byId("mission-select") as HTMLSelectElement;
  select.innerHTML = "";
  for (const m of missions) {
    const opt = document.createElement("option");
    opt.value = m.id;
    opt.textContent = m.name;
    select.append(opt);
  }
}

async function activateMission(id: string): Promise<void> {
  session.setMission(await api.getMission(id));
  const mission = session.activeMission;
  if (!mission) return;
  const epochs = mission.epochs.map((e) => e.epoch_id);
  if (epochs.length >= 2) {
    session.selectEpochs(epochs[epochs.length - 2], epochs[epochs.length - 1]);
  }
  await renderBoard();
  await renderCompare();
}

async function submitDrawnPolygon(polygon: unknown): Promise<void> {
  const mission = session.activeMission;
  if (!mission) return;
  const host = byId("plan-panel");
  host.innerHTML = "";
  try {
    const plan = await api.submitPlan(mission.id, polygon);
    host.append(renderStatsPanel(document, plan));
  } catch (err) {
    if (err instanceof ApiRequestError) {
      host.append(renderPlanError(document, err.body.message));
      return;
    }
    throw err;
  }
}

async function renderCompare(): Promise<void> {
  const mission = session.activeMission;
  if (!mission || !session.compareReady) {
    (byId("opacity-slider") as HTMLInputElement).disabled = true;
    byId("compare-hint").textContent = "select two epochs to compare";
    return;
  }
  (byId("opacity-slider") as HTMLInputElement).disabled = false;
  byId("compare-hint").textContent = "";
  const a = session.epochA as string;
  const b = session.epochB as string;
  (byId("layer-a") as HTMLImageElement).src = api.hillshadeUrl(mission.id, a);
  (byId("layer-b") as HTMLImageElement).src = api.hillshadeUrl(mission.id, b);
  applySlider(Number((byId("opacity-slider") as HTMLInputElement).value));

  const diff = await api.requestDiff(mission.id, a, b);
  const legendHost = byId("diff-legend");
  legendHost.innerHTML = "";
  legendHost.append(renderDiffLegend(document, diff));
}

function applySlider(t: number): void {
  const styles = layerStyles(t);
  byId("layer-a").setAttribute("style", styles.a);
  byId("layer-b").setAttribute("style", styles.b);
}

async function submitDrawnProfileLine(line: unknown): Promise<void> {
  const mission = session.activeMission;
  if (!mission || !session.compareReady) return;
  const response = await api.requestProfiles(mission.id, line, [
    session.epochA as string,
    session.epochB as string,
  ]);
  const model = buildChartModel(response);
  const host = byId("profile-chart");
  host.innerHTML = "";
  if (model.notice) {
    host.append(renderToast(document, model.notice));
    return;
  }
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", "0 0 640 240");
  const allY = model.series.flatMap((s) => s.points.map((p) => p[1]));
  const allX = model.series.flatMap((s) => s.points.map((p) => p[0]));
  const xr: [number, number] = [Math.min(...allX), Math.max(...allX)];
  const yr: [number, number] = [Math.min(...allY), Math.max(...allY)];
  for (const series of model.series) {
    const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
    path.setAttribute("d", seriesPath(series, 640, 240, xr, yr));
    path.setAttribute("fill", "none");
    path.dataset.epoch = series.epochId;
    svg.append(path);
  }
  host.append(svg);
}

let board: InspectionBoard | null = null;

async function renderBoard(): Promise<void> {
  const mission = session.activeMission;
  if (!mission) return;
  board = new InspectionBoard(api, mission.id);
  await board.reload();
  const host = byId("inspection-board");
  host.innerHTML = "";
  host.append(renderInspectionBoard(document, board.points));
}

function wireControls(): void {
  (byId("mission-select") as HTMLSelectElement).addEventListener("change", (ev) => {
    void activateMission((ev.target as HTMLSelectElement).value);
  });
  (byId("opacity-slider") as HTMLInputElement).addEventListener("input", (ev) => {
    applySlider(Number((ev.target as HTMLInputElement).value));
  });
  for (const mode of ["polygon", "profile", "pin"] as const) {
    byId(`mode-${mode}`).addEventListener("click", () => {
      session.setDrawingMode(session.drawingMode === mode ? null : mode);
    });
  }
}

export { submitDrawnPolygon, submitDrawnProfileLine, activateMission };

void (async () => {
  if (typeof document === "undefined") return;
  wireControls();
  await refreshMissionList();
})();

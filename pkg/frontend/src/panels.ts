/** DOM fragments for the side panels. Kept framework-free: each function
 * returns a detached element the caller mounts wherever it likes. */

import type { DiffResponse, PlanResponse } from "./api.js";
import { diffLegend, planStatsRows, standoffLabel } from "./format.js";
import { groupByRisk } from "./board.js";
import type { InspectionPoint } from "./api.js";

export function renderStatsPanel(doc: Document, plan: PlanResponse): HTMLElement {
  const panel = doc.createElement("div");
  panel.className = "stats-panel";
  const table = doc.createElement("table");
  for (const row of planStatsRows(plan.plan)) {
    const tr = doc.createElement("tr");
    const th = doc.createElement("th");
    th.textContent = row.label;
    const td = doc.createElement("td");
    td.textContent = row.value;
    td.dataset.raw = String(row.raw);
    tr.append(th, td);
    table.append(tr);
  }
  panel.append(table);
  return panel;
}

export function renderPlanError(doc: Document, message: string): HTMLElement {
  const el = doc.createElement("div");
  el.className = "plan-error";
  el.textContent = message;
  return el;
}

export function renderDiffLegend(doc: Document, diff: DiffResponse): HTMLElement {
  const el = doc.createElement("div");
  el.className = "diff-legend";

  const mean = doc.createElement("span");
  mean.className = "legend-mean";
  mean.textContent = diffLegend(diff.change);
  el.append(mean);

  const zones = doc.createElement("span");
  zones.className = "legend-zones";
  zones.textContent =
    diff.zones.length === 0
      ? "no hazard zones"
      : `${diff.zones.length} hazard zone(s), ${standoffLabel(diff.standoff_m)}`;
  el.append(zones);
  return el;
}

export function renderInspectionBoard(
  doc: Document,
  points: InspectionPoint[],
): HTMLElement {
  const el = doc.createElement("div");
  el.className = "inspection-board";
  const groups = groupByRisk(points);
  for (const risk of ["high", "medium", "low"] as const) {
    if (groups[risk].length === 0) continue;
    const section = doc.createElement("section");
    section.dataset.risk = risk;
    const heading = doc.createElement("h3");
    heading.textContent = `${risk} risk`;
    section.append(heading);
    const list = doc.createElement("ul");
    for (const p of groups[risk]) {
      const li = doc.createElement("li");
      li.dataset.pointId = p.id;
      li.dataset.status = p.status;
      li.textContent = `${p.id} (${p.lat.toFixed(6)}, ${p.lon.toFixed(6)}) ${p.status}`;
      if (p.note) li.textContent += ` - ${p.note}`;
      list.append(li);
    }
    section.append(list);
    el.append(section);
  }
  return el;
}

export function renderToast(doc: Document, message: string): HTMLElement {
  const el = doc.createElement("div");
  el.className = "toast";
  el.textContent = message;
  return el;
}

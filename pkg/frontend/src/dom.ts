/** DOM layer: two needle gauges, a rolling swing table, and a draggable
 * floating panel whose position persists for the browser session. */

import type { DashboardClient } from "./client.js";
import type { GaugeView } from "./gauges.js";
import { PlacementStore, type PanelPlacement } from "./placement.js";
import { TABLE_CAP } from "./table.js";

export function createPanel(
  root: HTMLElement,
  client: DashboardClient,
  placementStore: PlacementStore,
): { render: () => void } {
  const panel = document.createElement("div");
  panel.className = "swingmeter-panel";
  panel.innerHTML = `
    <div class="sm-header">
      <span class="sm-title">swing metrics</span>
      <span class="sm-status"></span>
    </div>
    <div class="sm-gauges">
      <div class="sm-gauge" data-metric="speed_mph">
        <svg viewBox="0 0 100 60">
          <path d="M10,55 A45,45 0 0 1 90,55" fill="none" stroke="#444" stroke-width="6"/>
          <line class="sm-needle" x1="50" y1="55" x2="50" y2="16" stroke="#e33" stroke-width="3"/>
        </svg>
        <div class="sm-digits">0.0</div>
        <div class="sm-label">swing speed (mph)</div>
      </div>
      <div class="sm-gauge" data-metric="power_pct">
        <svg viewBox="0 0 100 60">
          <path d="M10,55 A45,45 0 0 1 90,55" fill="none" stroke="#444" stroke-width="6"/>
          <line class="sm-needle" x1="50" y1="55" x2="50" y2="16" stroke="#3a3" stroke-width="3"/>
        </svg>
        <div class="sm-digits">0</div>
        <div class="sm-label">swing power (%)</div>
      </div>
    </div>
    <table class="sm-table">
      <thead><tr><th>t (s)</th><th>mph</th><th>power %</th></tr></thead>
      <tbody></tbody>
    </table>
    <div class="sm-empty">no swings yet</div>
  `;
  root.appendChild(panel);

  let placement = placementStore.load();
  applyPlacement(panel, placement);
  makeDraggable(panel, (next) => {
    placement = next;
    placementStore.save(next);
  });

  function renderGauge(element: Element, gauge: GaugeView, digits: number): void {
    const needle = element.querySelector<SVGLineElement>(".sm-needle")!;
    // sweep -80deg..+80deg across the gauge scale
    const angle = -80 + 160 * gauge.fraction();
    needle.setAttribute("transform", `rotate(${angle.toFixed(1)} 50 55)`);
    element.querySelector(".sm-digits")!.textContent = gauge.currentValue.toFixed(digits);
    element.classList.toggle("sm-stale", gauge.stale);
  }

  function render(): void {
    const status = panel.querySelector(".sm-status")!;
    status.textContent =
      client.status === "connected"
        ? client.sessionState ?? "connected"
        : client.status;
    panel.classList.toggle("sm-disconnected", client.status !== "connected");

    renderGauge(panel.querySelector('[data-metric="speed_mph"]')!, client.speedGauge, 1);
    renderGauge(panel.querySelector('[data-metric="power_pct"]')!, client.powerGauge, 0);

    const body = panel.querySelector("tbody")!;
    body.innerHTML = client.table.rows
      .slice(0, TABLE_CAP)
      .map(
        (row) =>
          `<tr><td>${(row.startMs / 1000).toFixed(1)}</td>` +
          `<td>${row.speedMph.toFixed(1)}</td><td>${row.powerPct.toFixed(0)}</td></tr>`,
      )
      .join("");
    panel.querySelector<HTMLElement>(".sm-empty")!.style.display = client.table.isEmpty
      ? "block"
      : "none";
  }

  return { render };
}

function applyPlacement(panel: HTMLElement, placement: PanelPlacement): void {
  panel.style.position = "fixed";
  panel.style.left = `${(placement.x * 100).toFixed(2)}vw`;
  panel.style.top = `${(placement.y * 100).toFixed(2)}vh`;
  panel.style.transform = "translateX(-50%)";
}

function makeDraggable(panel: HTMLElement, onMove: (placement: PanelPlacement) => void): void {
  const header = panel.querySelector<HTMLElement>(".sm-header")!;
  header.style.cursor = "move";
  header.addEventListener("pointerdown", (down) => {
    down.preventDefault();
    const startX = down.clientX;
    const startY = down.clientY;
    const rect = panel.getBoundingClientRect();
    const baseX = (rect.left + rect.width / 2) / window.innerWidth;
    const baseY = rect.top / window.innerHeight;

    function move(event: PointerEvent): void {
      const next: PanelPlacement = {
        x: Math.max(0, Math.min(1, baseX + (event.clientX - startX) / window.innerWidth)),
        y: Math.max(0, Math.min(1, baseY + (event.clientY - startY) / window.innerHeight)),
        docked: false,
      };
      applyPlacement(panel, next);
      onMove(next);
    }

    function up(): void {
      window.removeEventListener("pointermove", move);
      window.removeEventListener("pointerup", up);
    }

    window.addEventListener("pointermove", move);
    window.addEventListener("pointerup", up);
  });
}

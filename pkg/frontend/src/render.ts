// DOM rendering for the four panes and the latency badge.
//
// Mask and reconstruction panes display the exact PNG bytes sent by the
// service (as data URLs); nothing is recomputed client side.

import { SessionState } from "./state.js";
import { SolveResponse } from "./types.js";

export interface Panes {
  target: HTMLCanvasElement;
  mask: HTMLImageElement;
  recon: HTMLImageElement;
  curves: HTMLCanvasElement;
  badge: HTMLElement;
  stats: HTMLElement;
}

export function badgeFor(response: SolveResponse): { cls: string; text: string } {
  const ms = response.timing.total_ms.toFixed(1);
  const budget = response.budget_ms.toFixed(0);
  return response.budget_met
    ? { cls: "badge green", text: `${ms} ms / ${budget} ms budget` }
    : { cls: "badge amber", text: `${ms} ms / ${budget} ms budget` };
}

export function pngDataUrl(b64: string): string {
  return `data:image/png;base64,${b64}`;
}

export function renderTarget(canvas: HTMLCanvasElement,
                             state: SessionState): void {
  canvas.width = state.width;
  canvas.height = state.height;
  const ctx = canvas.getContext("2d");
  if (ctx === null) return; // headless test DOM has no raster backend
  ctx.fillStyle = "#000";
  ctx.fillRect(0, 0, state.width, state.height);
  ctx.fillStyle = "#fff";
  for (const spot of state.spots) {
    ctx.beginPath();
    ctx.arc(spot.j, spot.k, Math.max(state.spotRadius, 2), 0, 2 * Math.PI);
    ctx.fill();
  }
}

export function renderCurves(canvas: HTMLCanvasElement,
                             state: SessionState): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.fillStyle = "#111";
  ctx.fillRect(0, 0, w, h);
  if (state.curves.length === 0) return;

  const maxIter = state.curves[state.curves.length - 1].iter;
  const series: Array<{ color: string; values: number[] }> = [
    { color: "#4fc3f7", values: state.curves.map((p) => p.gap) },
    { color: "#ffb74d", values: state.curves.map((p) => p.errSum) },
  ];
  const floor = 1e-16;
  const logs = series.flatMap((s) => s.values.map((v) => Math.log10(Math.max(v, floor))));
  const lo = Math.min(...logs);
  const hi = Math.max(...logs, lo + 1e-9);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    state.curves.forEach((p, i) => {
      const x = (p.iter / maxIter) * (w - 10) + 5;
      const ly = Math.log10(Math.max(s.values[i], floor));
      const y = h - 5 - ((ly - lo) / (hi - lo)) * (h - 10);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}

export function renderViews(panes: Panes, state: SessionState): void {
  renderTarget(panes.target, state);
  renderCurves(panes.curves, state);
  const resp = state.lastResponse;
  if (resp === null) return;
  panes.mask.src = pngDataUrl(resp.mask_png_b64);
  panes.recon.src = pngDataUrl(resp.recon_log_png_b64);
  const badge = badgeFor(resp);
  panes.badge.className = badge.cls;
  panes.badge.textContent = badge.text;
  const contrast = resp.metrics.contrast === null
    ? "n/a" : String(resp.metrics.contrast);
  panes.stats.textContent =
    `gap ${resp.metrics.gap.toExponential(3)}  ` +
    `E_lit ${resp.metrics.err_lit.toExponential(3)}  ` +
    `E_dark ${resp.metrics.err_dark.toExponential(3)}  ` +
    `contrast ${contrast}  iters ${resp.iters_run}`;
}

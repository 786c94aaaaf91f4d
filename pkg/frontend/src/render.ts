/** Immediate-mode 2D rendering of the train, its path, and rolling plots.
 *
 * Drawing goes through the Ctx2D subset below so tests can record calls
 * with a fake context.  All positions come straight from snapshots; the
 * only client-side math is the world-to-screen camera transform.
 */

import { Camera, Viewport, worldToScreen } from "./camera.js";
import { Snapshot } from "./protocol.js";
import { PlotSample } from "./state.js";

export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export const AGENT_COLORS = ["#4ec9f0", "#f0a84e", "#8af04e", "#f04e8a",
                             "#b04ef0", "#f0e04e"];
const AGENT_SIZE_PX = 12;
const GHOST_RADIUS_PX = 6;

/** Screen-space triangle vertices for an oriented agent marker. */
export function agentTriangle(
  cam: Camera, vp: Viewport, x: number, y: number, heading: number,
): [number, number][] {
  const [cx, cy] = worldToScreen(cam, vp, x, y);
  const s = AGENT_SIZE_PX;
  // screen angle: world heading is counterclockwise with Y up, canvas Y is down
  const a = -heading;
  const tip: [number, number] = [cx + s * Math.cos(a), cy + s * Math.sin(a)];
  const left: [number, number] = [
    cx + 0.6 * s * Math.cos(a + (2.6 * Math.PI) / 3),
    cy + 0.6 * s * Math.sin(a + (2.6 * Math.PI) / 3),
  ];
  const right: [number, number] = [
    cx + 0.6 * s * Math.cos(a - (2.6 * Math.PI) / 3),
    cy + 0.6 * s * Math.sin(a - (2.6 * Math.PI) / 3),
  ];
  return [tip, left, right];
}

/** Screen-space centre of an agent or ghost marker. */
export function markerCenter(
  cam: Camera, vp: Viewport, x: number, y: number,
): [number, number] {
  return worldToScreen(cam, vp, x, y);
}

function pathToGlobal(snap: Snapshot, px: number, py: number): [number, number] {
  const { rotation, origin } = snap.frame;
  const c = Math.cos(rotation), s = Math.sin(rotation);
  return [origin[0] + c * px - s * py, origin[1] + s * px + c * py];
}

export function drawScene(ctx: Ctx2D, cam: Camera, vp: Viewport, snap: Snapshot): void {
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, vp.width, vp.height);

  // path polyline through the control points, mapped into the global frame
  if (snap.path_points.length > 1) {
    ctx.strokeStyle = "#3a4756";
    ctx.lineWidth = 2;
    ctx.beginPath();
    snap.path_points.forEach((p, i) => {
      const [gx, gy] = pathToGlobal(snap, p[0], p[1]);
      const [sx, sy] = worldToScreen(cam, vp, gx, gy);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
  }

  // ghost markers at the references, then the agents themselves
  snap.refs.forEach((r, i) => {
    const [sx, sy] = markerCenter(cam, vp, r[0], r[1]);
    ctx.strokeStyle = AGENT_COLORS[i % AGENT_COLORS.length];
    ctx.globalAlpha = 0.5;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(sx, sy, GHOST_RADIUS_PX, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.globalAlpha = 1.0;
  });
  snap.agents.forEach((a, i) => {
    const tri = agentTriangle(cam, vp, a[0], a[1], a[2]);
    ctx.fillStyle = AGENT_COLORS[i % AGENT_COLORS.length];
    ctx.beginPath();
    ctx.moveTo(tri[0][0], tri[0][1]);
    ctx.lineTo(tri[1][0], tri[1][1]);
    ctx.lineTo(tri[2][0], tri[2][1]);
    ctx.closePath();
    ctx.fill();
  });
}

export interface PlotBox {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Rolling per-agent series to plot; values are verbatim snapshot data. */
export function plotSeries(
  history: PlotSample[], pick: (s: PlotSample) => number[],
): { t: number; values: number[] }[] {
  return history.map((s) => ({ t: s.t, values: pick(s) }));
}

export function drawPlot(
  ctx: Ctx2D, box: PlotBox, history: PlotSample[],
  pick: (s: PlotSample) => number[], title: string,
): void {
  ctx.strokeStyle = "#3a4756";
  ctx.lineWidth = 1;
  ctx.strokeRect(box.x, box.y, box.width, box.height);
  ctx.fillStyle = "#9fb2c4";
  ctx.font = "11px sans-serif";
  ctx.fillText(title, box.x + 6, box.y + 14);
  const series = plotSeries(history, pick);
  if (series.length < 2) return;
  const tMin = series[0].t;
  const tMax = series[series.length - 1].t;
  const span = Math.max(tMax - tMin, 1e-9);
  let vMax = 1e-9;
  for (const s of series) for (const v of s.values) vMax = Math.max(vMax, v);
  const nSeries = series[0].values.length;
  for (let i = 0; i < nSeries; i++) {
    ctx.strokeStyle = AGENT_COLORS[i % AGENT_COLORS.length];
    ctx.beginPath();
    series.forEach((s, j) => {
      if (i >= s.values.length) return;
      const sx = box.x + ((s.t - tMin) / span) * box.width;
      const sy = box.y + box.height - (s.values[i] / vMax) * (box.height - 18);
      if (j === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
  }
  ctx.fillText(vMax.toPrecision(3), box.x + box.width - 52, box.y + 14);
}

// Canvas drawing. The geometry helpers are pure so tests can check plot
// coordinates without a DOM.

import type { ProfileFrame } from "./protocol";
import type { TracePoint, UiState } from "./state";
import { binToMeters, freqToVelocityMmS, groupToBin } from "./scales";
import { WaterfallBuffer } from "./waterfall";

export interface Pt {
  x: number;
  y: number;
}

// Polyline for the magnitude profile (log scale, normalized to the peak).
export function profilePath(bins: Uint32Array, w: number, h: number): Pt[] {
  let peak = 1;
  for (const b of bins) peak = Math.max(peak, b);
  const pts: Pt[] = [];
  for (let i = 0; i < bins.length; i++) {
    const db = bins[i] > 0 ? 20 * Math.log10(bins[i] / peak) : -80;
    const y = Math.min(1, Math.max(0, -db / 80)); // 80 dB window
    pts.push({ x: ((i + 0.5) / bins.length) * w, y: y * (h - 10) + 5 });
  }
  return pts;
}

export function tracePath(points: TracePoint[], w: number, h: number): Pt[] {
  if (points.length === 0) return [];
  let lo = Infinity;
  let hi = -Infinity;
  for (const p of points) {
    lo = Math.min(lo, p.displacementM);
    hi = Math.max(hi, p.displacementM);
  }
  const span = Math.max(hi - lo, 1e-6); // >= 1 um so a flat trace stays centered
  const mid = (hi + lo) / 2;
  const first = points[0].pulseIndex;
  const last = points[points.length - 1].pulseIndex;
  const dx = Math.max(last - first, 1);
  return points.map((p) => ({
    x: ((p.pulseIndex - first) / dx) * w,
    y: h / 2 - ((p.displacementM - mid) / span) * (h - 12),
  }));
}

function drawPolyline(ctx: CanvasRenderingContext2D, pts: Pt[], color: string) {
  if (pts.length === 0) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(pts[0].x, pts[0].y);
  for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i].x, pts[i].y);
  ctx.stroke();
}

function clear(ctx: CanvasRenderingContext2D) {
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
}

export function drawProfile(
  ctx: CanvasRenderingContext2D,
  profile: ProfileFrame | null,
  selectedBin: number | null,
  rangePerBinM: number,
) {
  clear(ctx);
  if (profile === null) return;
  const { width: w, height: h } = ctx.canvas;
  const pts = profilePath(profile.bins, w, h);
  drawPolyline(ctx, pts, "#58b2dc");

  let peakGroup = 0;
  for (let i = 1; i < profile.bins.length; i++) {
    if (profile.bins[i] > profile.bins[peakGroup]) peakGroup = i;
  }
  const peakBin = groupToBin(peakGroup, profile.stride);
  ctx.fillStyle = "#e8e8e8";
  ctx.font = "12px monospace";
  ctx.fillText(
    `peak bin ${peakBin} = ${binToMeters(peakBin, rangePerBinM).toFixed(1)} m`,
    8, 16,
  );
  if (selectedBin !== null) {
    const x = ((selectedBin / profile.stride + 0.5) / profile.bins.length) * w;
    ctx.strokeStyle = "#f5a623";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, h);
    ctx.stroke();
  }
}

export function drawTrace(ctx: CanvasRenderingContext2D, trace: TracePoint[]) {
  clear(ctx);
  const pts = tracePath(trace, ctx.canvas.width, ctx.canvas.height);
  drawPolyline(ctx, pts, "#7bd389");
  if (trace.length > 0) {
    const mm = trace[trace.length - 1].displacementM * 1e3;
    ctx.fillStyle = "#e8e8e8";
    ctx.font = "12px monospace";
    ctx.fillText(`${mm.toFixed(3)} mm`, 8, 16);
  }
}

export function drawSpectrum(ctx: CanvasRenderingContext2D, state: UiState) {
  clear(ctx);
  const rows = state.waterfall;
  if (rows.length === 0) return;
  const row = rows[rows.length - 1];
  const { width: w, height: h } = ctx.canvas;
  let peak = 1e-12;
  for (const m of row.magnitude) peak = Math.max(peak, m);
  ctx.fillStyle = "#c77dbb";
  const barW = w / row.magnitude.length;
  for (let i = 0; i < row.magnitude.length; i++) {
    const frac = row.magnitude[i] / peak;
    ctx.fillRect(i * barW, h * (1 - frac), Math.max(barW - 1, 1), h * frac);
  }
  ctx.fillStyle = "#e8e8e8";
  ctx.font = "12px monospace";
  const lam = state.hello?.wavelength_m ?? 0.0521;
  const label =
    state.axisMode === "velocity"
      ? `0 .. ${freqToVelocityMmS(row.freqHz[row.freqHz.length - 1], lam).toFixed(0)} mm/s`
      : `0 .. ${row.freqHz[row.freqHz.length - 1].toFixed(1)} Hz`;
  ctx.fillText(label, 8, 16);
}

export function drawWaterfall(ctx: CanvasRenderingContext2D, state: UiState) {
  clear(ctx);
  if (state.waterfall.length === 0) return;
  const buf = new WaterfallBuffer(state.waterfallCapacity);
  buf.rows = state.waterfall;
  const grid = buf.normalizedDb();
  const { width: w, height: h } = ctx.canvas;
  const cellH = h / state.waterfallCapacity;
  const cellW = w / grid[0].length;
  for (let r = 0; r < grid.length; r++) {
    for (let c = 0; c < grid[r].length; c++) {
      const v = grid[r][c];
      // dark blue floor to warm peak
      ctx.fillStyle = `rgb(${Math.round(30 + 200 * v)},${Math.round(20 + 120 * v)},${Math.round(60 + 60 * (1 - v))})`;
      ctx.fillRect(c * cellW, r * cellH, Math.ceil(cellW), Math.ceil(cellH));
    }
  }
}

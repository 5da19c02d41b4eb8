// Console entry point: one WebSocket, one reducer, one rAF render loop.
// Network events queue up and are folded into state at display cadence,
// so a 100 Hz frame stream never outruns rendering.

import { Command, decodeProfile, encodeCommand, parseServerMessage } from "./protocol";
import { initialState, reduce, UiEvent, UiState } from "./state";
import { clickToGroup, groupToBin } from "./scales";
import { drawProfile, drawSpectrum, drawTrace, drawWaterfall } from "./render";

const WS_URL = `ws://${location.hostname}:8765/ws`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function ctx2d(id: string): CanvasRenderingContext2D {
  return el<HTMLCanvasElement>(id).getContext("2d")!;
}

function main() {
  let state: UiState = initialState();
  const pending: UiEvent[] = [];
  const socket = new WebSocket(WS_URL);
  socket.binaryType = "arraybuffer";

  const send = (cmd: Command, id: number) => {
    if (socket.readyState === WebSocket.OPEN) socket.send(encodeCommand(cmd, id));
  };

  socket.addEventListener("open", () => pending.push({ kind: "open" }));
  socket.addEventListener("close", () => pending.push({ kind: "close" }));
  socket.addEventListener("message", (evt) => {
    if (typeof evt.data === "string") {
      pending.push({ kind: "message", msg: parseServerMessage(evt.data) });
    } else {
      pending.push({ kind: "profile", profile: decodeProfile(evt.data) });
    }
  });

  const profileCanvas = el<HTMLCanvasElement>("profile");
  profileCanvas.addEventListener("click", (evt) => {
    if (state.lastProfile === null) return;
    const rect = profileCanvas.getBoundingClientRect();
    const x = ((evt.clientX - rect.left) / rect.width) * profileCanvas.width;
    const group = clickToGroup(x, profileCanvas.width, state.lastProfile.bins.length);
    pending.push({ kind: "select_bin", bin: groupToBin(group, state.lastProfile.stride) });
  });

  const pushCmd = (cmd: Command) => pending.push({ kind: "command", cmd });
  el("start").addEventListener("click", () => pushCmd({ op: "start" }));
  el("stop").addEventListener("click", () => pushCmd({ op: "stop" }));
  el<HTMLSelectElement>("axis").addEventListener("change", (evt) => {
    const mode = (evt.target as HTMLSelectElement).value as "frequency" | "velocity";
    pushCmd({ op: "set_axis_mode", mode });
  });
  el<HTMLSelectElement>("pack").addEventListener("change", (evt) => {
    pushCmd({ op: "set_pack_size", n: Number((evt.target as HTMLSelectElement).value) });
  });
  el("apply-motion").addEventListener("click", () => {
    const freq = Number(el<HTMLInputElement>("vib-freq").value);
    const amp = Number(el<HTMLInputElement>("vib-amp").value) * 1e-3; // mm in the UI
    pushCmd({
      op: "set_motion",
      target: 0,
      motion: freq > 0
        ? { kind: "sinusoid", freq_hz: freq, peak_amp_m: amp }
        : { kind: "static" },
    });
  });
  el("apply-snr").addEventListener("click", () => {
    const raw = el<HTMLInputElement>("snr").value.trim();
    pushCmd({ op: "set_snr", snr_db: raw === "" ? null : Number(raw) });
  });

  const profileCtx = ctx2d("profile");
  const traceCtx = ctx2d("trace");
  const spectrumCtx = ctx2d("spectrum");
  const waterfallCtx = ctx2d("waterfall");
  const status = el("status");

  function tick() {
    while (pending.length > 0) {
      const r = reduce(state, pending.shift()!);
      state = r.state;
      for (const out of r.outbound) send(out.cmd, out.id);
    }
    const rpb = state.hello?.range_per_bin_m ?? 1.2491;
    drawProfile(profileCtx, state.lastProfile, state.selectedBin, rpb);
    drawTrace(traceCtx, state.trace);
    drawSpectrum(spectrumCtx, state);
    drawWaterfall(waterfallCtx, state);
    const bin = state.selectedBin === null ? "-" : String(state.selectedBin);
    status.textContent =
      `${state.connection}${state.streaming ? "" : " (paused)"} | bin ${bin}` +
      (state.lastError ? ` | last error: ${state.lastError}` : "");
    requestAnimationFrame(tick);
  }
  requestAnimationFrame(tick);
}

window.addEventListener("load", main);

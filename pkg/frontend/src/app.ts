/** Browser entry point: connect, render, steer.
 *
 * The gateway endpoint comes from the `ws` URL query parameter, e.g.
 * `index.html?ws=ws://127.0.0.1:8700/ws`.
 */

import { pan, Viewport, zoom } from "./camera.js";
import { dispatchKey } from "./input.js";
import { encode, parseServerMessage, validateGains } from "./protocol.js";
import { Ctx2D, drawPlot, drawScene } from "./render.js";
import { ViewState } from "./state.js";

const view = new ViewState();
let socket: WebSocket | null = null;

function endpoint(): string {
  const q = new URLSearchParams(window.location.search);
  return q.get("ws") ?? "ws://127.0.0.1:8700/ws";
}

function connect(): void {
  view.status = "connecting";
  setStatus("connecting to " + endpoint());
  const ws = new WebSocket(endpoint());
  socket = ws;
  ws.onmessage = (ev: MessageEvent) => {
    let msg;
    try {
      msg = parseServerMessage(String(ev.data));
    } catch {
      return;
    }
    if (msg.type === "hello") {
      view.onConnected(msg.writer);
      setStatus(`connected (${msg.writer ? "steering" : "view-only"}), scenario ${msg.digest}`);
    } else if (msg.type === "state") {
      view.ingest(msg.snapshot);
    } else {
      setStatus("gateway: " + msg.message);
    }
  };
  ws.onopen = () => ws.send(encode({ type: "hello" }));
  ws.onclose = () => {
    view.onDisconnected();
    setStatus("disconnected; retrying...");
    socket = null;
    window.setTimeout(connect, 2000);
  };
  ws.onerror = () => ws.close();
}

function send(msg: ReturnType<typeof dispatchKey>): void {
  if (msg && socket && socket.readyState === WebSocket.OPEN) {
    socket.send(encode(msg));
  }
}

function setStatus(text: string): void {
  const el = document.getElementById("status");
  if (el) el.textContent = text;
}

function hud(): string {
  const s = view.latest;
  if (!s) return "waiting for telemetry";
  const worst = s.err_norm.length ? Math.max(...s.err_norm) : 0;
  return `t=${s.t.toFixed(2)}s  k=${s.k}  v_cmd=${s.v_cmd.toFixed(2)} m/s  ` +
    `max|e|=${worst.toExponential(2)}  ${view.paused ? "PAUSED" : "RUNNING"}`;
}

function main(): void {
  const canvas = document.getElementById("world") as HTMLCanvasElement;
  const plots = document.getElementById("plots") as HTMLCanvasElement;
  const form = document.getElementById("gains-form") as HTMLFormElement;
  const formMsg = document.getElementById("gains-msg") as HTMLElement;

  window.addEventListener("keydown", (ev) => {
    if ((ev.target as HTMLElement)?.tagName === "INPUT") return;
    const msg = dispatchKey(ev.key, view);
    if (msg) {
      send(msg);
      ev.preventDefault();
    }
  });
  canvas.addEventListener("wheel", (ev) => {
    view.camera = zoom(view.camera, ev.deltaY < 0 ? 1.1 : 1 / 1.1);
    view.follow = true;
    ev.preventDefault();
  });
  let dragging = false;
  canvas.addEventListener("mousedown", () => { dragging = true; view.follow = false; });
  window.addEventListener("mouseup", () => { dragging = false; });
  canvas.addEventListener("mousemove", (ev) => {
    if (dragging) view.camera = pan(view.camera, ev.movementX, ev.movementY);
  });

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const val = (id: string) =>
      Number((document.getElementById(id) as HTMLInputElement).value);
    const res = validateGains(val("l1"), val("l2"), val("l3"));
    if (res.ok) {
      send(res.msg);
      formMsg.textContent = "gains sent";
    } else {
      formMsg.textContent = res.reason;  // nothing sent
    }
  });

  const frame = () => {
    const ctx = canvas.getContext("2d") as unknown as Ctx2D;
    const vp: Viewport = { width: canvas.width, height: canvas.height };
    if (view.latest) {
      drawScene(ctx, view.camera, vp, view.latest);
      const history = view.history.toArray();
      const pctx = plots.getContext("2d") as unknown as Ctx2D;
      pctx.fillStyle = "#101418";
      pctx.fillRect(0, 0, plots.width, plots.height);
      drawPlot(pctx, { x: 8, y: 8, width: plots.width - 16, height: plots.height / 2 - 12 },
               history, (s) => s.errNorm, "per-agent |e|");
      drawPlot(pctx, { x: 8, y: plots.height / 2 + 4,
                       width: plots.width - 16, height: plots.height / 2 - 12 },
               history, (s) => s.gaps, "spacing gaps [m]");
    }
    const hudEl = document.getElementById("hud");
    if (hudEl) hudEl.textContent = hud();
    window.requestAnimationFrame(frame);
  };
  window.requestAnimationFrame(frame);
  connect();
}

window.addEventListener("DOMContentLoaded", main);

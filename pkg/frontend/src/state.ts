/** Cockpit view state: everything rendered comes from snapshots.
 *
 * The UI never integrates dynamics client-side; it only buffers what the
 * gateway streamed.  Reconnecting clears the plot history so a new stream
 * starts clean.
 */

import { Camera, DEFAULT_SCALE } from "./camera.js";
import { Snapshot } from "./protocol.js";
import { RingBuffer } from "./ring.js";

export interface PlotSample {
  t: number;
  errNorm: number[];
  gaps: number[];
}

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

export const PLOT_CAPACITY = 600;

export class ViewState {
  latest: Snapshot | null = null;
  history = new RingBuffer<PlotSample>(PLOT_CAPACITY);
  status: ConnectionStatus = "disconnected";
  writer = false;
  camera: Camera = { cx: 0, cy: 0, scale: DEFAULT_SCALE };
  /** serve starts the engine paused; space toggles */
  paused = true;
  follow = true;

  ingest(snap: Snapshot): void {
    // advancing step counter is positive evidence the engine is running
    // (a paused engine emits nothing), so a reconnect mid-run self-corrects
    if (this.latest && snap.k > this.latest.k) this.paused = false;
    this.latest = snap;
    this.history.push({ t: snap.t, errNorm: [...snap.err_norm], gaps: [...snap.gaps] });
    if (this.follow && snap.agents.length > 0) {
      this.camera = { ...this.camera, cx: snap.agents[0][0], cy: snap.agents[0][1] };
    }
  }

  onConnected(writer: boolean): void {
    this.status = "connected";
    this.writer = writer;
    this.paused = true;
    this.history.clear();
  }

  onDisconnected(): void {
    this.status = "disconnected";
    this.latest = null;
  }

  /** Commanded speed shown in the HUD and used for speed increments. */
  get vCmd(): number {
    return this.latest ? this.latest.v_cmd : 0;
  }
}

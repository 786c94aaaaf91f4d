/** Keyboard bindings -> wire messages.
 *
 * Deltas mirror the engine defaults (5 degrees, 0.05 m/s) so a recorded
 * cockpit session can be replayed headless exactly.  Screen-right steers
 * clockwise, i.e. a negative heading delta.
 */

import { ClientMessage } from "./protocol.js";
import { ViewState } from "./state.js";

export const STEER_STEP_RAD = (5 * Math.PI) / 180;
export const SPEED_STEP = 0.05;

export function dispatchKey(key: string, view: ViewState): ClientMessage | null {
  if (view.status !== "connected") return null;
  switch (key) {
    case "ArrowLeft":
      return { type: "steer", radians: +STEER_STEP_RAD };
    case "ArrowRight":
      return { type: "steer", radians: -STEER_STEP_RAD };
    case "ArrowUp":
      return { type: "speed", mps: round3(view.vCmd + SPEED_STEP) };
    case "ArrowDown":
      return { type: "speed", mps: round3(Math.max(0, view.vCmd - SPEED_STEP)) };
    case " ": {
      const msg: ClientMessage = view.paused ? { type: "resume" } : { type: "pause" };
      view.paused = !view.paused;
      return msg;
    }
    case "r":
    case "R":
      return { type: "reset" };
    default:
      return null;
  }
}

function round3(v: number): number {
  return Math.round(v * 1000) / 1000;
}

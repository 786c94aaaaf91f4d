/** Gateway wire protocol: one JSON object per websocket text frame. */

export const MAX_STEER_RAD = (45 * Math.PI) / 180;

export interface Snapshot {
  k: number;
  t: number;
  /** per agent: [x1, x2, x3, u_act, w_act] in the global frame */
  agents: number[][];
  /** per agent: [x1s, x2s, x3s, u_ref, w_ref] in the global frame */
  refs: number[][];
  /** per agent control errors [e1, e2, e3] in the path frame */
  errors: number[][];
  inputs: number[][];
  /** path control points in the path's local frame */
  path_points: number[][];
  frame: { rotation: number; origin: number[] };
  err_norm: number[];
  gaps: number[];
  v_lyap: number[];
  v_cmd: number;
}

export type ServerMessage =
  | { type: "hello"; digest: string; dt: number; n_agents: number; writer: boolean }
  | { type: "state"; snapshot: Snapshot }
  | { type: "error"; message: string };

export type ClientMessage =
  | { type: "hello" }
  | { type: "steer"; radians: number }
  | { type: "speed"; mps: number }
  | { type: "gains"; lambda1: number; lambda2: number; lambda3: number }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reset" };

export function encode(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

export function parseServerMessage(text: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new Error("frame is not valid JSON");
  }
  if (typeof doc !== "object" || doc === null || !("type" in doc)) {
    throw new Error("frame must be an object with a `type` field");
  }
  const msg = doc as { type: string } & Record<string, unknown>;
  switch (msg.type) {
    case "hello":
      if (typeof msg.digest !== "string" || typeof msg.writer !== "boolean") {
        throw new Error("malformed hello frame");
      }
      return msg as ServerMessage;
    case "state": {
      const snap = msg.snapshot as Snapshot | undefined;
      if (!snap || typeof snap.k !== "number" || !Array.isArray(snap.agents)) {
        throw new Error("malformed state frame");
      }
      return msg as ServerMessage;
    }
    case "error":
      return { type: "error", message: String(msg.message ?? "") };
    default:
      throw new Error(`unknown frame type ${JSON.stringify(msg.type)}`);
  }
}

/** Client-side validation mirroring the gateway's Gains invariant. */
export function validateGains(
  lambda1: number,
  lambda2: number,
  lambda3: number,
): { ok: true; msg: ClientMessage } | { ok: false; reason: string } {
  const entries: [string, number][] = [
    ["lambda1", lambda1],
    ["lambda2", lambda2],
    ["lambda3", lambda3],
  ];
  for (const [name, v] of entries) {
    if (!Number.isFinite(v) || v <= 0) {
      return { ok: false, reason: `${name} must be a positive number` };
    }
  }
  return { ok: true, msg: { type: "gains", lambda1, lambda2, lambda3 } };
}

/** Typed view of the simulation server's websocket JSON protocol. */

export interface FrameView {
  k: number;
  theta: [number, number];
  cursor: [number, number];
  d: number;
  phi: number;
  mode: string;
  goals: number;
}

export interface SummaryView {
  GOAL: number;
  VIOL: number;
  DIST: number | null;
  AVG_DIST: number | null;
  method: string;
}

export interface ScenarioInfo {
  name: string;
  dt_s: number;
  max_steps: number;
  l1_m: number;
  l2_m: number;
  d_min_m: number;
  robot_goals_m: [number, number][];
  cursor_start_m: [number, number];
  methods: string[];
}

export type ServerMessage =
  | { type: "frame"; frame: FrameView }
  | { type: "summary"; summary: SummaryView }
  | { type: "warning"; detail: string };

function num(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function pair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 && num(v[0]) && num(v[1]);
}

/** Parse one raw server message; malformed messages return null (dropped). */
export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: Record<string, unknown>;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (msg === null || typeof msg !== "object") return null;
  switch (msg.type) {
    case "frame": {
      if (
        num(msg.k) && Number.isInteger(msg.k) && msg.k >= 0 &&
        pair(msg.theta) && pair(msg.cursor) &&
        num(msg.d) && num(msg.phi) &&
        typeof msg.mode === "string" && num(msg.goals)
      ) {
        return {
          type: "frame",
          frame: {
            k: msg.k, theta: msg.theta, cursor: msg.cursor,
            d: msg.d, phi: msg.phi, mode: msg.mode, goals: msg.goals,
          },
        };
      }
      return null;
    }
    case "summary":
      return { type: "summary", summary: msg as unknown as SummaryView };
    case "warning":
      return { type: "warning", detail: String(msg.detail ?? "") };
    default:
      return null;
  }
}

export function cursorMessage(x: number, y: number): string {
  return JSON.stringify({ type: "cursor", x, y });
}

export function startMessage(method: string, reset = false): string {
  return JSON.stringify({ type: reset ? "reset" : "start", method });
}

import { describe, expect, it } from "vitest";
import { cursorMessage, parseServerMessage, startMessage } from "../src/protocol.js";

const GOOD_FRAME = JSON.stringify({
  type: "frame", k: 7, theta: [0.1, 1.2], cursor: [0.6, 0.6],
  d: 0.31, phi: -0.07, mode: "rssa_override", goals: 2,
});

describe("parseServerMessage", () => {
  it("parses a well-formed frame", () => {
    const msg = parseServerMessage(GOOD_FRAME);
    expect(msg?.type).toBe("frame");
    if (msg?.type === "frame") {
      expect(msg.frame.k).toBe(7);
      expect(msg.frame.mode).toBe("rssa_override");
    }
  });

  it("drops malformed frames instead of throwing", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage("null")).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "frame", k: -1 }))).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "frame", k: 1.5, theta: [0, 0], cursor: [0, 0], d: 1, phi: 0, mode: "x", goals: 0 }))).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "teleport" }))).toBeNull();
  });

  it("passes warnings and summaries through", () => {
    const w = parseServerMessage(JSON.stringify({ type: "warning", detail: "bad" }));
    expect(w).toEqual({ type: "warning", detail: "bad" });
    const s = parseServerMessage(JSON.stringify({ type: "summary", GOAL: 3, VIOL: 0, DIST: 0.2, AVG_DIST: 0.3, method: "M4" }));
    expect(s?.type).toBe("summary");
  });
});

describe("client messages", () => {
  it("emits protocol-shaped cursor and start messages", () => {
    expect(JSON.parse(cursorMessage(0.1, 0.2))).toEqual({ type: "cursor", x: 0.1, y: 0.2 });
    expect(JSON.parse(startMessage("M3"))).toEqual({ type: "start", method: "M3" });
    expect(JSON.parse(startMessage("M3", true))).toEqual({ type: "reset", method: "M3" });
  });
});

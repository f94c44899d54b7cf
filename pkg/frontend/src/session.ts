/** Client-side session state: frame ordering, trails, and cursor throttling.
 *
 * The store applies frames strictly in tick order (out-of-order frames are
 * discarded), keeps only the latest frame for rendering, and maintains a
 * short trail plus a strip-chart history.  The UI never interpolates
 * physics: what the server sent is what gets drawn.
 */
import { FrameView } from "./protocol.js";

export class FrameStore {
  latest: FrameView | null = null;
  /** last `trailLength` frames, oldest first (for the fading trail) */
  trail: FrameView[] = [];
  /** strip-chart history of (k, d, phi), capped at `chartLength` */
  chart: { k: number; d: number; phi: number }[] = [];
  dropped = 0;

  constructor(public trailLength = 10, public chartLength = 600) {}

  /** Apply a frame; returns false when it was discarded as out of order. */
  push(frame: FrameView): boolean {
    if (this.latest !== null && frame.k <= this.latest.k) {
      this.dropped += 1;
      return false;
    }
    this.latest = frame;
    this.trail.push(frame);
    if (this.trail.length > this.trailLength) this.trail.shift();
    this.chart.push({ k: frame.k, d: frame.d, phi: frame.phi });
    if (this.chart.length > this.chartLength) this.chart.shift();
    return true;
  }

  reset(): void {
    this.latest = null;
    this.trail = [];
    this.chart = [];
    this.dropped = 0;
  }
}

/**
 * At most one cursor message per simulation tick: intermediate mouse moves
 * within a tick are coalesced to the newest position.
 */
export class CursorThrottle {
  private lastSent = -Infinity;
  private pending: [number, number] | null = null;

  constructor(
    private tickMs: number,
    private send: (x: number, y: number) => void,
    private now: () => number = () => Date.now(),
  ) {}

  move(x: number, y: number): void {
    const t = this.now();
    if (t - this.lastSent >= this.tickMs) {
      this.lastSent = t;
      this.pending = null;
      this.send(x, y);
    } else {
      this.pending = [x, y];
    }
  }

  /** Called once per animation frame to flush a coalesced move. */
  flush(): void {
    if (this.pending === null) return;
    const t = this.now();
    if (t - this.lastSent >= this.tickMs) {
      this.lastSent = t;
      const [x, y] = this.pending;
      this.pending = null;
      this.send(x, y);
    }
  }
}

/** Stall detector: true when no frame has arrived for `timeoutMs`. */
export class StallDetector {
  private lastFrame: number;

  constructor(private timeoutMs = 500, private now: () => number = () => Date.now()) {
    this.lastFrame = this.now();
  }

  onFrame(): void {
    this.lastFrame = this.now();
  }

  stalled(): boolean {
    return this.now() - this.lastFrame > this.timeoutMs;
  }
}

/** Cockpit entry point: wires the websocket, controls, and render loop. */
import { cursorMessage, parseServerMessage, ScenarioInfo, startMessage, SummaryView } from "./protocol.js";
import { CursorThrottle, FrameStore, StallDetector } from "./session.js";
import { canvasToWorld, fitTransform, Transform } from "./transform.js";
import { drawChart, drawScene } from "./render.js";

async function main(): Promise<void> {
  const sceneCanvas = document.getElementById("scene") as HTMLCanvasElement;
  const chartCanvas = document.getElementById("chart") as HTMLCanvasElement;
  const methodSel = document.getElementById("method") as HTMLSelectElement;
  const startBtn = document.getElementById("start") as HTMLButtonElement;
  const trailInput = document.getElementById("trail") as HTMLInputElement;
  const statusEl = document.getElementById("status") as HTMLElement;

  const base = location.origin.replace(/^http/, "ws");
  const info: ScenarioInfo = await (await fetch("/scenario")).json();
  for (const m of info.methods) {
    const opt = document.createElement("option");
    opt.value = m;
    opt.textContent = m;
    methodSel.appendChild(opt);
  }

  const reach = info.l1_m + info.l2_m;
  const transform: Transform = fitTransform({
    width: sceneCanvas.width,
    height: sceneCanvas.height,
    xMin: -reach * 1.1,
    xMax: reach * 1.1,
    yMin: -reach * 1.1,
    yMax: reach * 1.1,
  });

  const store = new FrameStore();
  const stall = new StallDetector(500);
  let running = false;
  let lastSummary: SummaryView | null = null;

  const socket = new WebSocket(`${base}/ws`);
  const throttle = new CursorThrottle(info.dt_s * 1000, (x, y) => {
    if (socket.readyState === WebSocket.OPEN && running) {
      socket.send(cursorMessage(x, y));
    }
  });

  socket.onmessage = (ev) => {
    const msg = parseServerMessage(String(ev.data));
    if (msg === null) return; // malformed frame dropped
    if (msg.type === "frame") {
      store.push(msg.frame);
      stall.onFrame();
    } else if (msg.type === "summary") {
      running = false;
      lastSummary = msg.summary;
    } else {
      statusEl.textContent = `warning: ${msg.detail}`;
    }
  };
  socket.onclose = () => {
    running = false;
    statusEl.textContent = "socket closed — reload to reconnect and reset";
  };

  startBtn.onclick = () => {
    // method changes take effect here: one trial per method
    store.reset();
    lastSummary = null;
    socket.send(startMessage(methodSel.value, running));
    running = true;
    statusEl.textContent = `running ${methodSel.value}`;
  };

  trailInput.onchange = () => {
    store.trailLength = Math.max(1, Number(trailInput.value) || 10);
  };

  sceneCanvas.onmousemove = (ev) => {
    const rect = sceneCanvas.getBoundingClientRect();
    const [x, y] = canvasToWorld(transform, ev.clientX - rect.left, ev.clientY - rect.top);
    throttle.move(x, y);
  };

  const sceneCtx = sceneCanvas.getContext("2d")!;
  const chartCtx = chartCanvas.getContext("2d")!;
  const tick = () => {
    throttle.flush();
    drawScene(sceneCtx, transform, info, store, running && stall.stalled());
    drawChart(chartCtx, store, info.d_min_m);
    if (lastSummary !== null) {
      statusEl.textContent =
        `${lastSummary.method} done: GOAL=${lastSummary.GOAL} ` +
        `VIOL=${lastSummary.VIOL} DIST=${lastSummary.DIST ?? "n/a"}`;
    }
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
}

main().catch((err) => {
  const el = document.getElementById("status");
  if (el) el.textContent = `startup failed: ${err}`;
});

/** Canvas scene renderer: grid, arm, cursor, goals, safety disc, trail,
 * and the d/phi strip chart.  Pure view — no physics on the client. */
import { ScenarioInfo } from "./protocol.js";
import { FrameStore } from "./session.js";
import { Transform, worldToCanvas } from "./transform.js";

const GRID_SPACING_M = 0.1;

export function armPoints(info: ScenarioInfo, theta: [number, number]) {
  const [t1, t2] = theta;
  const elbow: [number, number] = [
    info.l1_m * Math.cos(t1),
    info.l1_m * Math.sin(t1),
  ];
  const tip: [number, number] = [
    elbow[0] + info.l2_m * Math.cos(t1 + t2),
    elbow[1] + info.l2_m * Math.sin(t1 + t2),
  ];
  return { elbow, tip };
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  info: ScenarioInfo,
  store: FrameStore,
  stalled: boolean,
): void {
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.clearRect(0, 0, w, h);

  // 0.1 m background grid
  ctx.strokeStyle = "#e3e3e3";
  ctx.lineWidth = 1;
  const step = GRID_SPACING_M * t.scale;
  for (let x = t.offsetX % step; x < w; x += step) {
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, h);
    ctx.stroke();
  }
  for (let y = t.offsetY % step; y < h; y += step) {
    ctx.beginPath();
    ctx.moveTo(0, y);
    ctx.lineTo(w, y);
    ctx.stroke();
  }

  // robot goals
  ctx.fillStyle = "#888";
  for (const g of info.robot_goals_m) {
    const [gx, gy] = worldToCanvas(t, g[0], g[1]);
    ctx.beginPath();
    ctx.arc(gx, gy, 4, 0, 2 * Math.PI);
    ctx.fill();
  }

  const frame = store.latest;
  if (frame === null) return;

  // light-to-dark trail of the last ticks (cursor and arm tip)
  store.trail.forEach((f, i) => {
    const shade = 1 - (i + 1) / store.trail.length; // oldest lightest
    const gray = Math.round(70 + 150 * shade);
    const { tip } = armPoints(info, f.theta);
    ctx.fillStyle = `rgb(${gray}, ${gray}, 255)`;
    const [cx, cy] = worldToCanvas(t, f.cursor[0], f.cursor[1]);
    ctx.beginPath();
    ctx.arc(cx, cy, 3, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = `rgb(255, ${gray}, ${gray})`;
    const [tx, ty] = worldToCanvas(t, tip[0], tip[1]);
    ctx.beginPath();
    ctx.arc(tx, ty, 3, 0, 2 * Math.PI);
    ctx.fill();
  });

  // arm links
  const { elbow, tip } = armPoints(info, frame.theta);
  const base = worldToCanvas(t, 0, 0);
  const e = worldToCanvas(t, elbow[0], elbow[1]);
  const p = worldToCanvas(t, tip[0], tip[1]);
  ctx.strokeStyle = "#c0392b";
  ctx.lineWidth = 5;
  ctx.lineCap = "round";
  ctx.beginPath();
  ctx.moveTo(base[0], base[1]);
  ctx.lineTo(e[0], e[1]);
  ctx.lineTo(p[0], p[1]);
  ctx.stroke();

  // safety disc around the cursor; violation flash when d < d_min
  const violating = frame.d < info.d_min_m;
  const [cx, cy] = worldToCanvas(t, frame.cursor[0], frame.cursor[1]);
  ctx.strokeStyle = violating ? "#e74c3c" : "#27ae60";
  ctx.lineWidth = violating ? 3 : 1.5;
  ctx.beginPath();
  ctx.arc(cx, cy, info.d_min_m * t.scale, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.fillStyle = "#2980b9";
  ctx.beginPath();
  ctx.arc(cx, cy, 5, 0, 2 * Math.PI);
  ctx.fill();

  // status text
  ctx.fillStyle = violating ? "#e74c3c" : "#333";
  ctx.font = "13px monospace";
  ctx.fillText(
    `k=${frame.k}  d=${frame.d.toFixed(3)} m  goals=${frame.goals}  ${frame.mode}`,
    8, 18,
  );
  if (stalled) {
    ctx.fillStyle = "#e67e22";
    ctx.fillText("stalled: no frames from server", 8, 36);
  }
}

export function drawChart(
  ctx: CanvasRenderingContext2D,
  store: FrameStore,
  dMin: number,
): void {
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.clearRect(0, 0, w, h);
  if (store.chart.length < 2) return;
  const dMax = Math.max(dMin * 2, ...store.chart.map((c) => c.d));

  const y = (d: number) => h - (d / dMax) * (h - 10) - 5;
  const x = (i: number) => (i / (store.chart.length - 1)) * w;

  // d_min threshold line
  ctx.strokeStyle = "#e74c3c";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(0, y(dMin));
  ctx.lineTo(w, y(dMin));
  ctx.stroke();
  ctx.setLineDash([]);

  // separation trace
  ctx.strokeStyle = "#27ae60";
  ctx.beginPath();
  store.chart.forEach((c, i) => {
    if (i === 0) ctx.moveTo(x(i), y(c.d));
    else ctx.lineTo(x(i), y(c.d));
  });
  ctx.stroke();

  // phi trace, shown where the index is active (phi >= 0)
  ctx.strokeStyle = "#8e44ad";
  ctx.beginPath();
  let started = false;
  store.chart.forEach((c, i) => {
    if (c.phi >= 0) {
      const py = h - 8;
      if (!started) {
        ctx.moveTo(x(i), py);
        started = true;
      } else ctx.lineTo(x(i), py);
    } else started = false;
  });
  ctx.stroke();
}

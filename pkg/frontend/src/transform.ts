/** Affine world (meters) <-> canvas (pixels) transform.
 *
 * World y points up; canvas y points down.  The transform is an isotropic
 * scale plus a translation, so distances are preserved up to the single
 * pixels-per-meter factor and round-trips are exact up to float error.
 */
export interface Viewport {
  /** canvas size in pixels */
  width: number;
  height: number;
  /** world-coordinate window [xMin, xMax] x [yMin, yMax] to display */
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export interface Transform {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
}

export function fitTransform(v: Viewport): Transform {
  const spanX = v.xMax - v.xMin;
  const spanY = v.yMax - v.yMin;
  if (spanX <= 0 || spanY <= 0 || v.width <= 0 || v.height <= 0) {
    throw new Error("degenerate viewport");
  }
  const scale = Math.min(v.width / spanX, v.height / spanY);
  // center the world window on the canvas
  const cx = (v.xMin + v.xMax) / 2;
  const cy = (v.yMin + v.yMax) / 2;
  return {
    scale,
    offsetX: v.width / 2 - cx * scale,
    offsetY: v.height / 2 + cy * scale,
  };
}

export function worldToCanvas(t: Transform, x: number, y: number): [number, number] {
  return [t.offsetX + x * t.scale, t.offsetY - y * t.scale];
}

export function canvasToWorld(t: Transform, px: number, py: number): [number, number] {
  return [(px - t.offsetX) / t.scale, (t.offsetY - py) / t.scale];
}

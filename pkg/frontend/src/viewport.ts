/**
 * Pan/zoom math for the result view: world (outcome space, y up) to
 * screen (pixels, y down) transforms. Pure functions so the rendering
 * layer stays trivially testable.
 */

export interface Viewport {
  centerX: number;
  centerY: number;
  scale: number; // pixels per world unit
  width: number;
  height: number;
}

export function worldToScreen(v: Viewport, x: number, y: number): [number, number] {
  return [
    v.width / 2 + (x - v.centerX) * v.scale,
    v.height / 2 - (y - v.centerY) * v.scale,
  ];
}

export function screenToWorld(v: Viewport, px: number, py: number): [number, number] {
  return [
    v.centerX + (px - v.width / 2) / v.scale,
    v.centerY - (py - v.height / 2) / v.scale,
  ];
}

/** Viewport containing all points with a relative margin. */
export function fitPoints(
  points: [number, number][],
  width: number,
  height: number,
  margin = 0.15,
): Viewport {
  if (!points.length) {
    return { centerX: 0, centerY: 0, scale: 10, width, height };
  }
  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const [x, y] of points) {
    xMin = Math.min(xMin, x);
    xMax = Math.max(xMax, x);
    yMin = Math.min(yMin, y);
    yMax = Math.max(yMax, y);
  }
  const spanX = Math.max(xMax - xMin, 1e-9);
  const spanY = Math.max(yMax - yMin, 1e-9);
  const scale = Math.min(
    width / (spanX * (1 + 2 * margin)),
    height / (spanY * (1 + 2 * margin)),
  );
  return {
    centerX: (xMin + xMax) / 2,
    centerY: (yMin + yMax) / 2,
    scale,
    width,
    height,
  };
}

/** Zoom by a factor keeping the world point under the cursor fixed. */
export function zoomAt(v: Viewport, px: number, py: number, factor: number): Viewport {
  const [wx, wy] = screenToWorld(v, px, py);
  const scale = v.scale * factor;
  return {
    ...v,
    scale,
    centerX: wx - (px - v.width / 2) / scale,
    centerY: wy + (py - v.height / 2) / scale,
  };
}

export function pan(v: Viewport, dxPixels: number, dyPixels: number): Viewport {
  return {
    ...v,
    centerX: v.centerX - dxPixels / v.scale,
    centerY: v.centerY + dyPixels / v.scale,
  };
}

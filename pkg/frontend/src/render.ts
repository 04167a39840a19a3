/**
 * SVG fragment builders for the result view. Pure string producers so
 * they can be asserted on without a DOM.
 */

import { Viewport, worldToScreen } from "./viewport.js";

export function polygonPath(
  vertices: [number, number][],
  v: Viewport,
): string {
  if (!vertices.length) {
    return "";
  }
  const parts = vertices.map(([x, y], i) => {
    const [px, py] = worldToScreen(v, x, y);
    return `${i === 0 ? "M" : "L"}${px.toFixed(1)},${py.toFixed(1)}`;
  });
  return parts.join(" ") + " Z";
}

export function circleAttrs(
  center: [number, number],
  radius: number,
  v: Viewport,
): { cx: number; cy: number; r: number } {
  const [cx, cy] = worldToScreen(v, center[0], center[1]);
  return { cx, cy, r: radius * v.scale };
}

export function vertexMarkers(
  vertices: [number, number][],
  kinds: string[],
  v: Viewport,
): { cx: number; cy: number; kind: string }[] {
  return vertices.map(([x, y], i) => {
    const [cx, cy] = worldToScreen(v, x, y);
    return { cx, cy, kind: kinds[i] ?? "point" };
  });
}

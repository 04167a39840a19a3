import { describe, expect, it } from "vitest";

import {
  fitPoints,
  pan,
  screenToWorld,
  worldToScreen,
  zoomAt,
} from "../src/viewport.js";

const V = { centerX: 1, centerY: -2, scale: 20, width: 400, height: 300 };

describe("viewport transforms", () => {
  it("round-trips world and screen coordinates", () => {
    for (const [x, y] of [[0, 0], [3.5, -7], [-12, 40]] as [number, number][]) {
      const [px, py] = worldToScreen(V, x, y);
      const [wx, wy] = screenToWorld(V, px, py);
      expect(wx).toBeCloseTo(x, 10);
      expect(wy).toBeCloseTo(y, 10);
    }
  });

  it("puts the viewport center mid-screen with y up", () => {
    expect(worldToScreen(V, 1, -2)).toEqual([200, 150]);
    const [, pyAbove] = worldToScreen(V, 1, -1);
    expect(pyAbove).toBeLessThan(150);
  });

  it("fits points with margin", () => {
    const fitted = fitPoints([[0, 0], [10, 0], [0, 6]], 400, 300);
    for (const [x, y] of [[0, 0], [10, 0], [0, 6]] as [number, number][]) {
      const [px, py] = worldToScreen(fitted, x, y);
      expect(px).toBeGreaterThanOrEqual(0);
      expect(px).toBeLessThanOrEqual(400);
      expect(py).toBeGreaterThanOrEqual(0);
      expect(py).toBeLessThanOrEqual(300);
    }
  });

  it("zoomAt keeps the cursor's world point fixed", () => {
    const zoomed = zoomAt(V, 311, 42, 1.7);
    const before = screenToWorld(V, 311, 42);
    const after = screenToWorld(zoomed, 311, 42);
    expect(after[0]).toBeCloseTo(before[0], 9);
    expect(after[1]).toBeCloseTo(before[1], 9);
    expect(zoomed.scale).toBeCloseTo(V.scale * 1.7, 12);
  });

  it("pan moves the world opposite to the drag", () => {
    const panned = pan(V, 40, -30);
    expect(panned.centerX).toBeCloseTo(V.centerX - 2, 12);
    expect(panned.centerY).toBeCloseTo(V.centerY - 1.5, 12);
  });
});

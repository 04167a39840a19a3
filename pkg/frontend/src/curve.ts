/**
 * Trade-off curve helpers: click snapping and plot geometry.
 *
 * Snapping picks the nearest service-provided sample; the displayed
 * (r, alpha) pair is always an exact service value, never a client-side
 * formula evaluation (cosmetic interpolation is allowed for the path
 * only).
 */

export interface CurveSelection {
  r: number;
  alpha: number;
  index: number;
}

export function nearestSample(
  samples: [number, number][],
  rClick: number,
): CurveSelection {
  let best = 0;
  let bestDist = Infinity;
  samples.forEach(([r], i) => {
    const d = Math.abs(r - rClick);
    if (d < bestDist) {
      bestDist = d;
      best = i;
    }
  });
  const [r, alpha] = samples[best];
  return { r, alpha, index: best };
}

/** Reject selections at or beyond the validity radius. */
export function selectionValid(r: number, rValidity: number): boolean {
  return r > 0 && r < rValidity;
}

export interface PlotBox {
  width: number;
  height: number;
  rMax: number;
  alphaMax: number;
}

export function toPlotX(r: number, box: PlotBox): number {
  return (r / box.rMax) * box.width;
}

export function toPlotY(alpha: number, box: PlotBox): number {
  return box.height - (Math.min(alpha, box.alphaMax) / box.alphaMax) * box.height;
}

export function fromPlotX(x: number, box: PlotBox): number {
  return (x / box.width) * box.rMax;
}

/** SVG path for the sampled curve, clipped to the plot box. */
export function curvePath(samples: [number, number][], box: PlotBox): string {
  const parts: string[] = [];
  let pen = false;
  for (const [r, a] of samples) {
    if (a > box.alphaMax * 1.02) {
      pen = false;
      continue;
    }
    const cmd = pen ? "L" : "M";
    parts.push(`${cmd}${toPlotX(r, box).toFixed(2)},${toPlotY(a, box).toFixed(2)}`);
    pen = true;
  }
  return parts.join(" ");
}

/**
 * DOM wiring for the explorer page: curve panel on the left, result
 * view on the right, history strip and refine panel below.
 */

import { ApiClient, ServiceError } from "./api.js";
import { PlotBox, curvePath, fromPlotX, toPlotX, toPlotY } from "./curve.js";
import { polygonPath, circleAttrs, vertexMarkers } from "./render.js";
import { ProcedureState } from "./state.js";
import { Viewport, fitPoints, pan, screenToWorld, zoomAt } from "./viewport.js";

const params = new URLSearchParams(window.location.search);
const serviceUrl = params.get("service") ?? "http://127.0.0.1:8787";

const api = new ApiClient(serviceUrl);
const state = new ProcedureState(api);

const el = (id: string) => document.getElementById(id)!;
const banner = el("banner");

function showError(message: string, retry?: () => void) {
  banner.textContent = message;
  banner.style.display = "block";
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "retry";
    button.onclick = () => {
      banner.style.display = "none";
      retry();
    };
    banner.appendChild(button);
  }
}

function clearError() {
  banner.style.display = "none";
  banner.textContent = "";
}

// ---------------------------------------------------------------- curve panel

const curveSvg = el("curve-svg") as unknown as SVGSVGElement;
const BOX: PlotBox = { width: 560, height: 300, rMax: 10.5, alphaMax: 30 };

function drawCurve() {
  if (!state.curve) {
    return;
  }
  const c = state.curve;
  const pieces: string[] = [];
  pieces.push(
    `<path d="${curvePath(c.samples, BOX)}" fill="none" stroke="#2c6fb3" stroke-width="2"/>`,
  );
  if (c.r_validity <= BOX.rMax) {
    const x = toPlotX(c.r_validity, BOX);
    pieces.push(
      `<line x1="${x}" y1="0" x2="${x}" y2="${BOX.height}" stroke="#333" stroke-dasharray="6,4"/>`,
      `<text x="${x + 4}" y="16" font-size="12">validity radius</text>`,
    );
  }
  if (state.selection) {
    const sx = toPlotX(state.selection.r, BOX);
    const sy = toPlotY(state.selection.alpha, BOX);
    pieces.push(
      `<circle cx="${sx}" cy="${sy}" r="5" fill="#b3372c"/>`,
      `<text x="${sx + 8}" y="${sy - 8}" font-size="12" fill="#b3372c">` +
        `(${state.selection.r.toFixed(3)}, ${state.selection.alpha.toFixed(4)})</text>`,
    );
  }
  curveSvg.innerHTML = pieces.join("");
  el("curve-note").textContent =
    `delta = ${state.delta}; validity radius ${state.curve.r_validity.toFixed(4)}`;
}

async function reloadCurve(delta: number) {
  try {
    clearError();
    await state.loadCurve(delta);
    drawCurve();
  } catch (err) {
    showError(`service unreachable: ${err}`, () => reloadCurve(delta));
  }
}

const deltaSlider = el("delta-slider") as HTMLInputElement;
const deltaInput = el("delta-input") as HTMLInputElement;
deltaSlider.oninput = () => {
  deltaInput.value = deltaSlider.value;
  void reloadCurve(parseFloat(deltaSlider.value));
};
deltaInput.onchange = () => {
  deltaSlider.value = deltaInput.value;
  void reloadCurve(parseFloat(deltaInput.value));
};

curveSvg.addEventListener("click", (ev: MouseEvent) => {
  const rect = curveSvg.getBoundingClientRect();
  const r = fromPlotX(ev.clientX - rect.left, BOX);
  const result = state.selectTradeoff(r);
  if (!result.ok) {
    showError(`selection rejected: ${result.reason}`);
    return;
  }
  clearError();
  (el("radius-input") as HTMLInputElement).value = String(state.roiRadius);
  drawCurve();
});

// ---------------------------------------------------------------- result view

const resultSvg = el("result-svg") as unknown as SVGSVGElement;
let viewport: Viewport = { centerX: 0, centerY: 0, scale: 5, width: 640, height: 640 };

function drawResult() {
  const run = state.current;
  const pieces: string[] = [];
  if (run) {
    pieces.push(
      `<path d="${polygonPath(run.vertices, viewport)}" fill="#2c6fb3" ` +
        `fill-opacity="0.25" stroke="#2c6fb3" stroke-width="1.5"/>`,
    );
    for (const m of vertexMarkers(run.vertices, run.vertex_kinds, viewport)) {
      pieces.push(
        `<circle cx="${m.cx.toFixed(1)}" cy="${m.cy.toFixed(1)}" r="2.5" ` +
          `fill="${m.kind === "direction" ? "#7a2cb3" : "#111"}"/>`,
      );
    }
    const roi = circleAttrs(
      [run.center[0], run.center[1]],
      run.radius,
      viewport,
    );
    pieces.push(
      `<circle cx="${roi.cx}" cy="${roi.cy}" r="${roi.r}" fill="#b3372c" ` +
        `fill-opacity="0.25" stroke="#b3372c"/>`,
    );
  }
  resultSvg.innerHTML = pieces.join("");
  const info = el("result-info");
  if (run) {
    const bound =
      run.bound !== undefined
        ? `error bound inside RoI: ${run.bound.toFixed(4)}`
        : `no bound (${run.bound_omitted_reason})`;
    info.textContent =
      `run #${run.index}: delta ${run.delta}, gap estimate ` +
      `${run.gap_estimate.toExponential(2)}, ${bound}`;
  } else {
    info.textContent = "no run yet";
  }
}

let dragging = false;
let lastX = 0;
let lastY = 0;
resultSvg.addEventListener("mousedown", (ev: MouseEvent) => {
  dragging = true;
  lastX = ev.clientX;
  lastY = ev.clientY;
});
window.addEventListener("mouseup", () => {
  dragging = false;
});
window.addEventListener("mousemove", (ev: MouseEvent) => {
  if (dragging) {
    viewport = pan(viewport, ev.clientX - lastX, ev.clientY - lastY);
    lastX = ev.clientX;
    lastY = ev.clientY;
    drawResult();
  }
});
resultSvg.addEventListener("wheel", (ev: WheelEvent) => {
  ev.preventDefault();
  const rect = resultSvg.getBoundingClientRect();
  viewport = zoomAt(
    viewport,
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    ev.deltaY < 0 ? 1.2 : 1 / 1.2,
  );
  drawResult();
});

resultSvg.addEventListener("dblclick", async (ev: MouseEvent) => {
  // double-click near the boundary refines toward a weakly minimal point
  if (!state.current) {
    return;
  }
  const rect = resultSvg.getBoundingClientRect();
  const [wx, wy] = screenToWorld(
    viewport,
    ev.clientX - rect.left,
    ev.clientY - rect.top,
  );
  try {
    const refined = await state.refine([wx, wy]);
    el("refine-info").textContent =
      `refined image (${refined.image[0].toFixed(4)}, ` +
      `${refined.image[1].toFixed(4)}), decision variables ` +
      `[${refined.x.map((v) => v.toFixed(4)).join(", ")}], t = ` +
      refined.t.toFixed(4) +
      (refined.t < 0 ? " (reference was interior)" : "");
  } catch (err) {
    if (err instanceof ServiceError && err.status === 422) {
      showError("refinement unavailable: ordering cone has no interior");
    } else {
      showError(`refine failed: ${err}`, () => undefined);
    }
  }
});

// ------------------------------------------------------------------- history

function drawHistory() {
  const strip = el("history-strip");
  strip.innerHTML = "";
  state.history.forEach((entry) => {
    const chip = document.createElement("button");
    chip.className = "history-chip";
    chip.textContent =
      `#${entry.index} d=${entry.delta} r=${entry.radius} @ ` +
      `(${entry.center.join(", ")})`;
    chip.onclick = () => {
      state.current = entry;
      viewport = fitPoints(entry.vertices, viewport.width, viewport.height);
      drawResult();
    };
    strip.appendChild(chip);
  });
}

el("replay-button").onclick = async () => {
  if (!state.history.length) {
    return;
  }
  el("replay-info").textContent = "replaying...";
  const report = await state.replayHistory();
  el("replay-info").textContent = report.identical
    ? `replay of ${report.runs} runs reproduced identical polygons`
    : `replay mismatch on runs ${report.mismatchedRuns.join(", ")}`;
};

// ----------------------------------------------------------------------- run

el("run-button").onclick = async () => {
  const center: [number, number] = [
    parseFloat((el("center-x") as HTMLInputElement).value),
    parseFloat((el("center-y") as HTMLInputElement).value),
  ];
  state.setRoiCenter(center[0], center[1]);
  state.setRoiRadius(parseFloat((el("radius-input") as HTMLInputElement).value));
  const progress = el("progress");
  progress.style.display = "inline";
  try {
    clearError();
    const run = await state.runPolled((active) => {
      progress.textContent = active ? "computing..." : "done";
    });
    viewport = fitPoints(run.vertices, viewport.width, viewport.height);
    drawResult();
    drawHistory();
  } catch (err) {
    showError(`run failed: ${err}`, () => undefined);
  } finally {
    progress.style.display = "none";
  }
};

// ---------------------------------------------------------------------- init

async function init() {
  try {
    await state.init();
    await reloadCurve(parseFloat(deltaSlider.value));
    drawResult();
  } catch (err) {
    showError(`could not reach service at ${serviceUrl}: ${err}`, init);
  }
}

void init();

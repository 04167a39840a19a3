import { describe, expect, it } from "vitest";

import { ApiClient, CurvePayload, RunSummary } from "../src/api.js";
import { ProcedureState } from "../src/state.js";

/** In-memory stand-in for the service, deterministic like the real one. */
class FakeApi extends ApiClient {
  sessions = 0;
  runsBySession = new Map<string, RunSummary[]>();

  constructor() {
    super("fake://");
  }

  override async createSession(): Promise<string> {
    this.sessions += 1;
    const id = `s${this.sessions}`;
    this.runsBySession.set(id, []);
    return id;
  }

  override async curve(delta: number, count = 400): Promise<CurvePayload> {
    const rv = Math.sqrt(1 / (delta * delta) - 1);
    const samples: [number, number][] = [];
    for (let i = 1; i <= count; i++) {
      const r = (rv * 0.999 * i) / count;
      samples.push([r, (delta * (r * r + 1)) / (Math.sqrt(1 - delta * delta) - delta * r)]);
    }
    return { delta, r_validity: rv, samples };
  }

  override async approximate(
    sessionId: string,
    req: { delta: number; center: number[]; radius: number; seed?: number },
  ): Promise<RunSummary> {
    const runs = this.runsBySession.get(sessionId)!;
    // deterministic synthetic polygon depending only on the request
    const k = Math.round(3 + 10 * (1 - req.delta));
    const vertices: [number, number][] = [];
    for (let i = 0; i < k; i++) {
      vertices.push([
        req.center[0] + Math.cos(i) * (1 + req.radius),
        req.center[1] + Math.sin(i) * (1 + req.radius),
      ]);
    }
    const summary: RunSummary = {
      index: runs.length,
      delta: req.delta,
      center: req.center,
      radius: req.radius,
      seed: req.seed ?? 0,
      status: "Success",
      gap_estimate: req.delta * 0.8,
      region_of_validity: Math.sqrt(1 / (req.delta * req.delta) - 1),
      vertices,
      vertices_shifted: vertices,
      vertex_kinds: vertices.map(() => "point"),
      far_points: [],
      X: vertices.map(() => [0]),
      bound: 1.23,
    };
    runs.push(summary);
    return summary;
  }
}

describe("procedure state", () => {
  it("selects trade-offs by snapping and rejects beyond validity", async () => {
    const state = new ProcedureState(new FakeApi());
    await state.init();
    await state.loadCurve(0.1);
    const picked = state.selectTradeoff(5.0);
    expect(picked.ok).toBe(true);
    expect(picked.selection!.r).toBeCloseTo(5.0, 1);
    expect(state.roiRadius).toBe(picked.selection!.r);
    // the displayed pair is a service sample, untouched by the client
    const sample = state.curve!.samples[picked.selection!.index];
    expect(picked.selection!.alpha).toBe(sample[1]);

    const rejected = state.selectTradeoff(11.0);
    expect(rejected.ok).toBe(false);
    expect(rejected.reason).toBe("OutOfValidity");
  });

  it("appends runs to history and keeps them deterministic on replay", async () => {
    const state = new ProcedureState(new FakeApi());
    await state.init();
    await state.loadCurve(0.5);
    state.setRoiCenter(0, -20);
    state.setRoiRadius(0.4);
    await state.run();
    state.setRoiCenter(0, 0);
    state.setRoiRadius(1.5);
    await state.run();
    expect(state.history.map((h) => h.index)).toEqual([0, 1]);
    const report = await state.replayHistory();
    expect(report.identical).toBe(true);
    expect(report.runs).toBe(2);
  });

  it("keeps exact typed radii over snapped samples", async () => {
    const state = new ProcedureState(new FakeApi());
    await state.init();
    await state.loadCurve(0.9);
    state.selectTradeoff(0.41);
    state.setRoiRadius(0.4);
    expect(state.roiRadius).toBe(0.4);
    state.setRoiRadius(-1);
    expect(state.roiRadius).toBe(0.4);
  });
});

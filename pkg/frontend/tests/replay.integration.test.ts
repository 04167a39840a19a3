/**
 * End-to-end procedure replay against a live service.
 *
 * Spawns the Python service, drives the four-step example sequence
 * through the same state machine the page uses, checks the displayed
 * bound values for the first three steps against their reference
 * values, and replays the history to confirm identical polygons.
 */

import { spawn, ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ProcedureState } from "../src/state.js";

const here = dirname(fileURLToPath(import.meta.url));
const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function waitReady(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/curve?delta=0.5&count=5`);
      if (res.ok) {
        return;
      }
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) {
      throw new Error("service did not come up");
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "homroi.cli", "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitReady();
}, 60000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("four-step example sequence", () => {
  const api = new ApiClient(BASE);
  const state = new ProcedureState(api, { builtin: "parabola2d" });

  const steps = [
    { delta: 0.9, center: [0, -20] as [number, number], radius: 0.4, bound: 13.7568, rv: 0.4843 },
    { delta: 0.5, center: [0, 0] as [number, number], radius: 1.5, bound: 14.0056, rv: 1.7321 },
    { delta: 0.1, center: [0, 0] as [number, number], radius: 5.0, bound: 5.2527, rv: 9.9499 },
    { delta: 0.01, center: [0, 0] as [number, number], radius: 50.0, bound: null, rv: 99.995 },
  ];

  it(
    "executes all four steps with the reference bounds displayed",
    async () => {
      await state.init();
      for (const step of steps) {
        const curve = await state.loadCurve(step.delta);
        // the dashed validity-radius guide drawn by the curve panel
        expect(Math.abs(curve.r_validity - step.rv)).toBeLessThan(1e-3);
        expect(curve.r_validity).toBeGreaterThan(step.radius);
        const picked = state.selectTradeoff(step.radius);
        expect(picked.ok).toBe(true);
        state.setRoiRadius(step.radius); // exact typed radius
        state.setRoiCenter(step.center[0], step.center[1]);
        const run = await state.runPolled(() => undefined, 1);
        expect(run.status).toBe("Success");
        expect(run.gap_estimate).toBeLessThanOrEqual(step.delta);
        if (step.bound !== null) {
          expect(run.bound).toBeDefined();
          expect(Math.abs(run.bound! - step.bound)).toBeLessThan(1e-3);
        }
        expect(run.vertices.length).toBeGreaterThan(2);
      }
      expect(state.history.length).toBe(4);
    },
    300000,
  );

  it(
    "replays the history with identical polygons",
    async () => {
      const report = await state.replayHistory();
      expect(report.runs).toBe(4);
      expect(report.identical).toBe(true);
    },
    300000,
  );

  it("conforms to the shipped interface schema", async () => {
    const schemaPath = join(
      here, "..", "..", "src", "homroi", "interface_schema.json",
    );
    const schema = JSON.parse(readFileSync(schemaPath, "utf-8"));
    const approx = schema.endpoints["POST /sessions/{id}/approximate"];
    const required = new Set<string>(approx.response);
    const optional = new Set<string>(approx.response_optional);
    for (const entry of state.history) {
      const keys = Object.keys(entry);
      for (const field of required) {
        expect(keys).toContain(field);
      }
      for (const key of keys) {
        expect(required.has(key) || optional.has(key)).toBe(true);
      }
    }
  });

  it("surfaces refinement results from the service", async () => {
    const refined = await state.refine([0, -2], [0.70710678, 0.70710678]);
    expect(refined.t).toBeCloseTo(Math.SQRT2, 4);
    expect(refined.image[0]).toBeCloseTo(0, 4);
    expect(refined.image[1]).toBeCloseTo(-1, 4);
    const interior = await state.refine([0, 5]);
    expect(interior.t).toBeLessThan(0);
  });

  it("rejects out-of-validity curve selections", async () => {
    await state.loadCurve(0.1);
    const rejected = state.selectTradeoff(11.0);
    expect(rejected.ok).toBe(false);
    expect(rejected.reason).toBe("OutOfValidity");
  });
});
